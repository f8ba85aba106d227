//! Closed-form statistics of the two three-outcome receivers: postselected
//! homodyne detection and displacement followed by photon-number-resolving
//! (PNR) counting.

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_probability, Error, Result};
use crate::signal::{DiscriminationResult, Hypothesis, OutcomeProbabilities, SignalEnsemble};
use crate::special::{normal_upper_tail, poisson_window};

/// Vacuum quadrature variance in the `x = (a + a^dag)/sqrt(2)` convention.
pub const SHOT_NOISE_VARIANCE: f64 = 0.5;

/// Default count resolution of the PNR detector.
pub const DEFAULT_COUNT_CAP: u32 = 32;

/// Electronic noise variance for a noise floor `db_below_shot_noise` dB
/// under the shot noise level.
pub fn electronic_noise_variance_from_db(db_below_shot_noise: f64) -> f64 {
    10f64.powf(-db_below_shot_noise / 10.0) * SHOT_NOISE_VARIANCE
}

/// Postselected homodyne receiver: `x >= B` guesses plus, `x <= -B` guesses
/// minus, anything in between is inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomodyneReceiverConfig {
    pub threshold_b: f64,
    #[serde(default = "one")]
    pub efficiency: f64,
    #[serde(default)]
    pub electronic_noise_variance: f64,
}

fn one() -> f64 {
    1.0
}

impl HomodyneReceiverConfig {
    pub fn ideal(threshold_b: f64) -> Self {
        Self {
            threshold_b,
            efficiency: 1.0,
            electronic_noise_variance: 0.0,
        }
    }

    /// Laboratory detector: 85.8 % efficiency and electronic noise 23 dB
    /// below shot noise.
    pub fn experimental(threshold_b: f64) -> Self {
        Self {
            threshold_b,
            efficiency: 0.858,
            electronic_noise_variance: electronic_noise_variance_from_db(23.0),
        }
    }

    /// Ideal receiver whose threshold realizes the likelihood-ratio rule with
    /// threshold `lambda_b`.
    pub fn from_likelihood_threshold(lambda_b: f64, alpha: f64) -> Result<Self> {
        Ok(Self::ideal(likelihood_to_quadrature_threshold(
            lambda_b, alpha,
        )?))
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative("threshold_b", self.threshold_b)?;
        check_non_negative("electronic_noise_variance", self.electronic_noise_variance)?;
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::Domain {
                name: "efficiency",
                value: self.efficiency,
                expected: "(0, 1]",
            });
        }
        Ok(())
    }

    pub fn quadrature_sd(&self) -> f64 {
        (SHOT_NOISE_VARIANCE + self.electronic_noise_variance).sqrt()
    }

    /// Quadrature mean of the attenuated signal for one hypothesis.
    pub fn quadrature_mean(&self, alpha: f64, hypothesis: Hypothesis) -> f64 {
        hypothesis.sign() * (2.0 * self.efficiency).sqrt() * alpha
    }

    /// Verdict probabilities for one prepared state.
    pub fn outcomes(&self, alpha: f64, hypothesis: Hypothesis) -> OutcomeProbabilities {
        let mean = self.quadrature_mean(alpha, hypothesis);
        let sd = self.quadrature_sd();
        let b = self.threshold_b;
        let guess_plus = normal_upper_tail(b, mean, sd);
        // P(x <= -B) by mirror symmetry.
        let guess_minus = normal_upper_tail(b, -mean, sd);
        let inconclusive = if b == 0.0 {
            0.0
        } else {
            (1.0 - guess_plus - guess_minus).max(0.0)
        };
        OutcomeProbabilities {
            guess_minus,
            guess_plus,
            inconclusive,
        }
    }
}

/// The PNR receiver's three-outcome POVM: `{0}` guesses minus, `{1..=m}` is
/// inconclusive, `{m+1..}` guesses plus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PnrPovm {
    pub m: u32,
}

impl PnrPovm {
    pub fn decide(&self, count: u32) -> Option<Hypothesis> {
        match count {
            0 => Some(Hypothesis::Minus),
            n if n <= self.m => None,
            _ => Some(Hypothesis::Plus),
        }
    }

    /// Verdict probabilities when the count is Poisson with `mean`.
    pub fn outcomes(&self, mean: f64) -> Result<OutcomeProbabilities> {
        let guess_minus = poisson_window(mean, 0, Some(0))?;
        let inconclusive = if self.m == 0 {
            0.0
        } else {
            poisson_window(mean, 1, Some(self.m))?
        };
        let guess_plus = poisson_window(mean, self.m + 1, None)?;
        Ok(OutcomeProbabilities {
            guess_minus,
            guess_plus,
            inconclusive,
        })
    }
}

/// Displacement-controlled PNR receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PnrReceiverConfig {
    pub beta: f64,
    pub m: u32,
    #[serde(default = "one")]
    pub efficiency: f64,
    /// Mean dark counts per gate.
    #[serde(default)]
    pub dark_count_mean: f64,
    /// Fraction of the signal that interferes with the displacement beam.
    #[serde(default = "one")]
    pub mode_match: f64,
    #[serde(default = "default_cap")]
    pub count_cap: u32,
}

fn default_cap() -> u32 {
    DEFAULT_COUNT_CAP
}

impl PnrReceiverConfig {
    pub fn ideal(beta: f64, m: u32) -> Self {
        Self {
            beta,
            m,
            efficiency: 1.0,
            dark_count_mean: 0.0,
            mode_match: 1.0,
            count_cap: DEFAULT_COUNT_CAP,
        }
    }

    /// Laboratory detector: 55 % overall efficiency and a 1/700 extinction
    /// ratio.
    pub fn experimental(beta: f64, m: u32) -> Self {
        Self {
            efficiency: 0.55,
            mode_match: 699.0 / 700.0,
            ..Self::ideal(beta, m)
        }
    }

    /// Kennedy receiver: nulling displacement and on/off detection.
    pub fn kennedy(alpha: f64) -> Self {
        Self::ideal(alpha, 0)
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Self { beta, ..*self }
    }

    pub fn povm(&self) -> PnrPovm {
        PnrPovm { m: self.m }
    }

    pub fn validate(&self) -> Result<()> {
        check_non_negative("beta", self.beta)?;
        check_probability("efficiency", self.efficiency)?;
        check_probability("mode_match", self.mode_match)?;
        check_non_negative("dark_count_mean", self.dark_count_mean)?;
        if self.m >= self.count_cap {
            return Err(Error::InvalidConfig(format!(
                "threshold m = {} must be below the count cap {}",
                self.m, self.count_cap
            )));
        }
        Ok(())
    }

    /// Mean detected photon number for one hypothesis.
    ///
    /// A fraction `mode_match` of the signal interferes with the
    /// displacement; the orthogonal remainder adds its photons incoherently.
    /// Detector efficiency scales the displaced mean and dark counts add on
    /// top.
    pub fn detected_mean(&self, alpha: f64, hypothesis: Hypothesis) -> f64 {
        let xi = self.mode_match;
        let coherent = self.beta + hypothesis.sign() * alpha;
        let incoherent = self.beta * self.beta + alpha * alpha;
        self.efficiency * (xi * coherent * coherent + (1.0 - xi) * incoherent)
            + self.dark_count_mean
    }
}

/// Error and inconclusive statistics of the displacement-controlled PNR
/// receiver.
pub fn pnr_receiver(
    ensemble: &SignalEnsemble,
    cfg: &PnrReceiverConfig,
) -> Result<DiscriminationResult> {
    cfg.validate()?;
    let povm = cfg.povm();
    let alpha = ensemble.alpha();
    let given_minus = povm.outcomes(cfg.detected_mean(alpha, Hypothesis::Minus))?;
    let given_plus = povm.outcomes(cfg.detected_mean(alpha, Hypothesis::Plus))?;
    Ok(DiscriminationResult::from_outcomes(
        ensemble,
        given_minus,
        given_plus,
    ))
}

/// Error and inconclusive statistics of the postselected homodyne receiver.
pub fn homodyne_receiver(
    ensemble: &SignalEnsemble,
    cfg: &HomodyneReceiverConfig,
) -> Result<DiscriminationResult> {
    cfg.validate()?;
    let alpha = ensemble.alpha();
    Ok(DiscriminationResult::from_outcomes(
        ensemble,
        cfg.outcomes(alpha, Hypothesis::Minus),
        cfg.outcomes(alpha, Hypothesis::Plus),
    ))
}

/// Quadrature threshold `B = ln(lambda_b) / (4 sqrt(2) alpha)` equivalent to
/// a likelihood-ratio threshold `lambda_b` for the ideal homodyne marginals.
pub fn likelihood_to_quadrature_threshold(lambda_b: f64, alpha: f64) -> Result<f64> {
    if !(lambda_b >= 1.0 && lambda_b.is_finite()) {
        return Err(Error::Domain {
            name: "lambda_b",
            value: lambda_b,
            expected: ">= 1 and finite",
        });
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            expected: "> 0",
        });
    }
    Ok(lambda_b.ln() / (4.0 * std::f64::consts::SQRT_2 * alpha))
}

/// Inverse of [`likelihood_to_quadrature_threshold`].
pub fn quadrature_to_likelihood_threshold(threshold_b: f64, alpha: f64) -> Result<f64> {
    check_non_negative("threshold_b", threshold_b)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            expected: "> 0",
        });
    }
    Ok((4.0 * std::f64::consts::SQRT_2 * alpha * threshold_b).exp())
}
