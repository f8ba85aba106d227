use serde::{Deserialize, Serialize};

use crate::error::{check_non_negative, Error, Result};
use crate::signal::{DiscriminationResult, OutcomeProbabilities, SignalEnsemble};
use crate::special::erfc;

/// A noise-free Gaussian measurement: projection on displaced squeezed
/// states with squeezing `r e^{i phi}`, followed by a likelihood-ratio
/// decision with threshold `lambda_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMeasurementParams {
    pub squeezing: f64,
    pub phase: f64,
    pub lambda_b: f64,
}

impl GaussianMeasurementParams {
    pub fn new(squeezing: f64, phase: f64, lambda_b: f64) -> Result<Self> {
        check_non_negative("squeezing", squeezing)?;
        if !(lambda_b >= 1.0 && lambda_b.is_finite()) {
            return Err(Error::Domain {
                name: "lambda_b",
                value: lambda_b,
                expected: ">= 1",
            });
        }
        Ok(Self {
            squeezing,
            phase: phase.rem_euclid(std::f64::consts::TAU),
            lambda_b,
        })
    }

    pub fn a(&self) -> f64 {
        gaussian_a(self.squeezing, self.phase)
    }
}

/// Effective signal fraction seen by the measurement,
/// `(1 + cosh 2r + sinh 2r cos phi) / (2 (cosh 2r + 1))`.
///
/// Equals 1/2 without squeezing (heterodyne-like) and tends to 1 for
/// infinite amplitude squeezing along the signal (homodyne).
pub fn gaussian_a(squeezing: f64, phase: f64) -> f64 {
    let (s, c) = ((2.0 * squeezing).sinh(), (2.0 * squeezing).cosh());
    if !c.is_finite() {
        // Leading order for huge squeezing.
        return 0.5 * (1.0 + phase.cos());
    }
    (1.0 + c + s * phase.cos()) / (2.0 * (c + 1.0))
}

/// Error and inconclusive probabilities of the Gaussian measurement
/// `params`.
///
/// Per hypothesis, with `c = sqrt(2a) alpha`, `L = ln(p1/p2)` and
/// `t = (ln lambda_b -+ L) / (4 sqrt(2) alpha)`:
/// `p_e = erfc(c + t_e)/2`, `p_s = erfc(c - t_s)/2`, `p_i = p_s - p_e`.
pub fn gaussian_receiver_rates(
    ensemble: &SignalEnsemble,
    params: &GaussianMeasurementParams,
) -> Result<DiscriminationResult> {
    let alpha = ensemble.alpha();
    let (p1, p2) = (ensemble.prior_minus(), ensemble.prior_plus());
    if alpha == 0.0 {
        if params.lambda_b > 1.0 {
            return Err(Error::Domain {
                name: "alpha",
                value: alpha,
                expected: "> 0 when lambda_b > 1",
            });
        }
        // Bayesian rule on identical states: guess the likelier one, minus on a tie.
        let guess_minus = if p1 >= p2 { 1.0 } else { 0.0 };
        let table = OutcomeProbabilities {
            guess_minus,
            guess_plus: 1.0 - guess_minus,
            inconclusive: 0.0,
        };
        return Ok(DiscriminationResult::from_outcomes(ensemble, table, table));
    }
    let log_ratio = if p1 > 0.0 && p2 > 0.0 {
        (p1 / p2).ln()
    } else if p1 > 0.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    let ln_lambda = params.lambda_b.ln();
    let c = (2.0 * params.a()).sqrt() * alpha;
    let scale = 4.0 * std::f64::consts::SQRT_2 * alpha;

    // Upper sign belongs to |+a> in the error terms and to |-a> in the
    // success terms.
    let table = |sign: f64| {
        let t_e = (ln_lambda - sign * log_ratio) / scale;
        let t_s = (ln_lambda + sign * log_ratio) / scale;
        let p_e = 0.5 * erfc(c + t_e);
        let p_s = 0.5 * erfc(c - t_s);
        let inconclusive = (p_s - p_e).max(0.0);
        let correct = 0.5 * erfc(-(c - t_s));
        (p_e, correct, inconclusive)
    };
    let (err_plus, correct_plus, inc_plus) = table(1.0);
    let (err_minus, correct_minus, inc_minus) = table(-1.0);
    Ok(DiscriminationResult::from_outcomes(
        ensemble,
        OutcomeProbabilities {
            guess_minus: correct_minus,
            guess_plus: err_minus,
            inconclusive: inc_minus,
        },
        OutcomeProbabilities {
            guess_minus: err_plus,
            guess_plus: correct_plus,
            inconclusive: inc_plus,
        },
    ))
}
