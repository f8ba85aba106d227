//! Fundamental limits for discriminating `|-a>` from `|+a>`.
//!
//! * [`gaussian_receiver_rates`] evaluates the whole family of noise-free
//!   Gaussian measurements (displaced squeezed-state projections followed by
//!   a likelihood-ratio decision with an inconclusive band),
//! * [`helstrom_bound`] and [`usd_bound`] are the two deterministic and
//!   error-free endpoints,
//! * [`optimal_id_bound`] interpolates between them numerically.

mod gaussian;
mod id_oracle;

pub use gaussian::{gaussian_a, gaussian_receiver_rates, GaussianMeasurementParams};
pub use id_oracle::{
    optimal_id_bound, optimal_id_bound_with, IdBoundPoint, IdOracleOptions, Matrix2x2,
};

use crate::error::{Error, Result};
use crate::signal::{coherent_overlap, SignalEnsemble};

/// Minimum average error of any deterministic two-outcome measurement.
pub fn helstrom_bound(ensemble: &SignalEnsemble) -> f64 {
    let overlap_sq = (-4.0 * ensemble.mean_photons()).exp();
    let p1p2 = ensemble.prior_minus() * ensemble.prior_plus();
    0.5 * (1.0 - (1.0 - 4.0 * p1p2 * overlap_sq).max(0.0).sqrt())
}

/// Error-free discrimination endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsdPoint {
    pub p_inc: f64,
    pub p_err: f64,
}

/// Optimal unambiguous discrimination for equal priors: the inconclusive
/// rate equals the overlap.
pub fn usd_bound(ensemble: &SignalEnsemble) -> Result<UsdPoint> {
    if !ensemble.has_equal_priors() {
        return Err(Error::InvalidConfig(
            "unambiguous discrimination bound is implemented for equal priors".into(),
        ));
    }
    Ok(UsdPoint {
        p_inc: coherent_overlap(ensemble.alpha())?,
        p_err: 0.0,
    })
}

/// Smallest inconclusive rate at which error-free discrimination becomes
/// possible, for arbitrary priors.
pub(crate) fn usd_inconclusive_rate(ensemble: &SignalEnsemble) -> f64 {
    let s = (-2.0 * ensemble.mean_photons()).exp();
    let (lo, hi) = {
        let (a, b) = (ensemble.prior_minus(), ensemble.prior_plus());
        (a.min(b), a.max(b))
    };
    if hi == 0.0 {
        return 1.0;
    }
    if s <= (lo / hi).sqrt() {
        2.0 * (lo * hi).sqrt() * s
    } else {
        lo + hi * s * s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn helstrom_examples() {
        let e = |a2: f64| SignalEnsemble::from_mean_photons(a2).unwrap();
        assert_relative_eq!(helstrom_bound(&e(0.0)), 0.5);
        assert_relative_eq!(
            helstrom_bound(&e(0.47)),
            0.039_725_654_027_101_97,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            helstrom_bound(&e(0.24)),
            0.107_219_172_430_448_19,
            max_relative = 1e-12
        );
    }

    #[test]
    fn usd_examples() {
        let e = |a2: f64| SignalEnsemble::from_mean_photons(a2).unwrap();
        assert_eq!(usd_bound(&e(0.0)).unwrap().p_inc, 1.0);
        assert_relative_eq!(usd_bound(&e(0.24)).unwrap().p_inc, (-0.48f64).exp());
        assert_relative_eq!(usd_bound(&e(0.47)).unwrap().p_inc, (-0.94f64).exp());
        assert_eq!(usd_bound(&e(0.47)).unwrap().p_err, 0.0);
        let skewed = SignalEnsemble::with_prior_minus(0.5, 0.8).unwrap();
        assert!(usd_bound(&skewed).is_err());
    }

    #[test]
    fn general_usd_rate_reduces_to_overlap() {
        let e = SignalEnsemble::from_mean_photons(0.3).unwrap();
        assert_relative_eq!(
            usd_inconclusive_rate(&e),
            (-0.6f64).exp(),
            max_relative = 1e-14
        );
    }
}
