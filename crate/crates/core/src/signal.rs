//! Binary coherent-state alphabet and the elementary state-space quantities
//! shared by every receiver model.
//!
//! Conventions used throughout the crate:
//!
//! * amplitudes are real and non-negative; the two signals are `|-a>` and
//!   `|+a>`,
//! * the measured quadrature is `x = (a + a^dag) / sqrt(2)`, so the vacuum
//!   variance is `1/2` and `|+-a>` has mean `+-sqrt(2) a`,
//! * a displacement `D(b)` maps `|+-a>` to `|b +- a>`, so the vacuum outcome
//!   points at `|-a>`.

use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, check_probability, Error, Result};

const PRIOR_TOLERANCE: f64 = 1e-12;

/// Which of the two signals was sent (or is being guessed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    Minus,
    Plus,
}

impl Hypothesis {
    /// `-1.0` for [`Hypothesis::Minus`], `+1.0` for [`Hypothesis::Plus`].
    pub fn sign(self) -> f64 {
        match self {
            Hypothesis::Minus => -1.0,
            Hypothesis::Plus => 1.0,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Hypothesis::Minus => Hypothesis::Plus,
            Hypothesis::Plus => Hypothesis::Minus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Hypothesis::Minus => "minus",
            Hypothesis::Plus => "plus",
        }
    }
}

/// The alphabet `{|-a>, |+a>}` together with its prior probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalEnsemble {
    alpha: f64,
    prior_minus: f64,
    prior_plus: f64,
}

impl SignalEnsemble {
    pub fn new(alpha: f64, prior_minus: f64, prior_plus: f64) -> Result<Self> {
        check_non_negative("alpha", alpha)?;
        check_probability("prior_minus", prior_minus)?;
        check_probability("prior_plus", prior_plus)?;
        if (prior_minus + prior_plus - 1.0).abs() > PRIOR_TOLERANCE {
            return Err(Error::InvalidConfig(format!(
                "priors {prior_minus} + {prior_plus} do not sum to one"
            )));
        }
        Ok(Self {
            alpha,
            prior_minus,
            prior_plus,
        })
    }

    /// Equal priors.
    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.5, 0.5)
    }

    /// Equal priors, parameterized by the mean photon number `|a|^2`.
    pub fn from_mean_photons(alpha_sq: f64) -> Result<Self> {
        check_non_negative("alpha_sq", alpha_sq)?;
        Self::symmetric(alpha_sq.sqrt())
    }

    /// Prior on `|-a>` only; the other prior is its complement.
    pub fn with_prior_minus(alpha: f64, prior_minus: f64) -> Result<Self> {
        check_probability("prior_minus", prior_minus)?;
        Self::new(alpha, prior_minus, 1.0 - prior_minus)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mean_photons(&self) -> f64 {
        self.alpha * self.alpha
    }

    pub fn prior_minus(&self) -> f64 {
        self.prior_minus
    }

    pub fn prior_plus(&self) -> f64 {
        self.prior_plus
    }

    pub fn prior(&self, hypothesis: Hypothesis) -> f64 {
        match hypothesis {
            Hypothesis::Minus => self.prior_minus,
            Hypothesis::Plus => self.prior_plus,
        }
    }

    pub fn has_equal_priors(&self) -> bool {
        (self.prior_minus - self.prior_plus).abs() <= PRIOR_TOLERANCE
    }

    /// Same priors, different amplitude.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.prior_minus, self.prior_plus)
    }

    /// The ensemble with hypotheses relabeled (priors swapped).
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.alpha,
            prior_minus: self.prior_plus,
            prior_plus: self.prior_minus,
        }
    }
}

/// Probabilities of the three receiver verdicts for one prepared state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbabilities {
    pub guess_minus: f64,
    pub guess_plus: f64,
    pub inconclusive: f64,
}

impl OutcomeProbabilities {
    pub fn total(&self) -> f64 {
        self.guess_minus + self.guess_plus + self.inconclusive
    }

    pub fn conclusive(&self) -> f64 {
        self.guess_minus + self.guess_plus
    }

    pub fn guess(&self, hypothesis: Hypothesis) -> f64 {
        match hypothesis {
            Hypothesis::Minus => self.guess_minus,
            Hypothesis::Plus => self.guess_plus,
        }
    }

    /// Verdict table with the roles of the two guesses exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            guess_minus: self.guess_plus,
            guess_plus: self.guess_minus,
            inconclusive: self.inconclusive,
        }
    }
}

/// Error and inconclusive statistics of a three-outcome receiver.
///
/// `p_err` is conditioned on a conclusive outcome and is `None` when every
/// outcome is inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationResult {
    pub p_err: Option<f64>,
    pub p_inc: f64,
    pub p_err_given_minus: f64,
    pub p_err_given_plus: f64,
    pub p_inc_given_minus: f64,
    pub p_inc_given_plus: f64,
    /// `P(conclusive)`, accumulated from the conclusive verdicts so that it
    /// stays accurate when `p_inc` is close to one.
    pub p_conclusive: f64,
    /// Posterior probability of `|-a>` among conclusive outcomes.
    pub conclusive_prior_minus: Option<f64>,
    pub given_minus: OutcomeProbabilities,
    pub given_plus: OutcomeProbabilities,
}

impl DiscriminationResult {
    pub fn from_outcomes(
        ensemble: &SignalEnsemble,
        given_minus: OutcomeProbabilities,
        given_plus: OutcomeProbabilities,
    ) -> Self {
        let (p1, p2) = (ensemble.prior_minus(), ensemble.prior_plus());
        let clamp = |p: f64| p.clamp(0.0, 1.0);
        let err_minus = clamp(given_minus.guess_plus);
        let err_plus = clamp(given_plus.guess_minus);
        let inc_minus = clamp(given_minus.inconclusive);
        let inc_plus = clamp(given_plus.inconclusive);
        let conclusive_minus = p1 * clamp(given_minus.conclusive());
        let conclusive_plus = p2 * clamp(given_plus.conclusive());
        let p_conclusive = conclusive_minus + conclusive_plus;
        let (p_err, conclusive_prior_minus) = if p_conclusive > 0.0 {
            (
                Some(clamp((p1 * err_minus + p2 * err_plus) / p_conclusive)),
                Some(conclusive_minus / p_conclusive),
            )
        } else {
            (None, None)
        };
        Self {
            p_err,
            p_inc: clamp(p1 * inc_minus + p2 * inc_plus),
            p_err_given_minus: err_minus,
            p_err_given_plus: err_plus,
            p_inc_given_minus: inc_minus,
            p_inc_given_plus: inc_plus,
            p_conclusive,
            conclusive_prior_minus,
            given_minus,
            given_plus,
        }
    }

    /// Error probability not conditioned on a conclusive outcome.
    pub fn p_err_unconditional(&self, ensemble: &SignalEnsemble) -> f64 {
        ensemble.prior_minus() * self.p_err_given_minus
            + ensemble.prior_plus() * self.p_err_given_plus
    }

    /// Conditional error rate, or an error when it is undefined.
    pub fn conditional_error(&self) -> Result<f64> {
        self.p_err
            .ok_or(Error::Undefined("every outcome is inconclusive"))
    }

    pub fn outcomes(&self, hypothesis: Hypothesis) -> &OutcomeProbabilities {
        match hypothesis {
            Hypothesis::Minus => &self.given_minus,
            Hypothesis::Plus => &self.given_plus,
        }
    }
}

/// `|<-a|+a>| = exp(-2 a^2)`.
pub fn coherent_overlap(alpha: f64) -> Result<f64> {
    check_non_negative("alpha", alpha)?;
    Ok((-2.0 * alpha * alpha).exp())
}

/// Mean photon number of `D(beta)|+-alpha>`.
pub fn displaced_mean_photon(alpha: f64, beta: f64, hypothesis: Hypothesis) -> Result<f64> {
    check_non_negative("alpha", alpha)?;
    check_non_negative("beta", beta)?;
    let amplitude = beta + hypothesis.sign() * alpha;
    Ok(amplitude * amplitude)
}

/// Quadrature marginal of `|+-alpha>`: normal with mean `+-sqrt(2) alpha`
/// and variance `1/2`.
pub fn quadrature_pdf(x: f64, alpha: f64, hypothesis: Hypothesis) -> f64 {
    let mean = hypothesis.sign() * std::f64::consts::SQRT_2 * alpha;
    let d = x - mean;
    (-d * d).exp() / std::f64::consts::PI.sqrt()
}
