use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::signal::Hypothesis;

use super::TrialRecord;

/// Two-sided 95 % normal quantile.
pub const WILSON_Z_95: f64 = 1.959_963_984_540_054;

/// Which receiver's verdicts to estimate from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Receiver {
    Homodyne,
    Pnr,
}

impl Receiver {
    pub fn as_str(self) -> &'static str {
        match self {
            Receiver::Homodyne => "homodyne",
            Receiver::Pnr => "pnr",
        }
    }
}

/// Settings for turning records into rate estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationContext {
    /// Amplitude the estimate is meant to describe.
    pub alpha: f64,
    /// Normal quantile used for the Wilson intervals.
    pub z: f64,
}

impl EstimationContext {
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            z: WILSON_Z_95,
        }
    }

    pub fn with_z(self, z: f64) -> Self {
        Self { z, ..self }
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Undefined("no trials"));
    }
    if k > n {
        return Err(Error::InvalidConfig(format!("{k} successes in {n} trials")));
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lower = if k == 0.0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let upper = if k == n {
        1.0
    } else {
        (center + half).min(1.0)
    };
    Ok((lower, upper))
}

/// A rate with its counts and confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateWithInterval {
    pub value: f64,
    pub successes: u64,
    pub trials: u64,
    pub lower: f64,
    pub upper: f64,
}

impl RateWithInterval {
    fn new(successes: u64, trials: u64, z: f64) -> Option<Self> {
        let (lower, upper) = wilson_interval(successes, trials, z).ok()?;
        Some(Self {
            value: successes as f64 / trials as f64,
            successes,
            trials,
            lower,
            upper,
        })
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

/// Empirical error and inconclusive rates of one receiver.
///
/// `p_err` is conditioned on a conclusive verdict; it is `None` and
/// `undefined` is set when no verdict was conclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub receiver: Receiver,
    /// Amplitude the analytic comparison should use.
    pub comparison_alpha: f64,
    pub n_trials: u64,
    pub n_conclusive: u64,
    pub n_errors: u64,
    pub p_err: Option<RateWithInterval>,
    pub p_inc: RateWithInterval,
    pub p_err_given_minus: Option<RateWithInterval>,
    pub p_err_given_plus: Option<RateWithInterval>,
    pub p_inc_given_minus: Option<RateWithInterval>,
    pub p_inc_given_plus: Option<RateWithInterval>,
    pub undefined: bool,
}

/// Tallies the verdicts of `receiver` over `records`.
pub fn estimate_rates(
    records: &[TrialRecord],
    receiver: Receiver,
    context: &EstimationContext,
) -> Result<RateEstimate> {
    if records.is_empty() {
        return Err(Error::Undefined("no trial records"));
    }
    if !(context.z > 0.0 && context.z.is_finite()) {
        return Err(Error::Domain {
            name: "z",
            value: context.z,
            expected: "> 0",
        });
    }
    // [minus, plus] x [sent, errors, inconclusive]
    let mut tally = [[0u64; 3]; 2];
    for r in records {
        let slot = usize::from(r.true_state == Hypothesis::Plus);
        let d = r.decision(receiver);
        tally[slot][0] += 1;
        if d.is_error(r.true_state) {
            tally[slot][1] += 1;
        } else if d == super::Decision::Inconclusive {
            tally[slot][2] += 1;
        }
    }
    let n = records.len() as u64;
    let n_inc = tally[0][2] + tally[1][2];
    let n_conclusive = n - n_inc;
    let n_errors = tally[0][1] + tally[1][1];
    let z = context.z;
    let per_state =
        |slot: usize, col: usize| RateWithInterval::new(tally[slot][col], tally[slot][0], z);
    Ok(RateEstimate {
        receiver,
        comparison_alpha: context.alpha,
        n_trials: n,
        n_conclusive,
        n_errors,
        p_err: RateWithInterval::new(n_errors, n_conclusive, z),
        p_inc: RateWithInterval::new(n_inc, n, z).expect("n > 0"),
        p_err_given_minus: per_state(0, 1),
        p_err_given_plus: per_state(1, 1),
        p_inc_given_minus: per_state(0, 2),
        p_inc_given_plus: per_state(1, 2),
        undefined: n_conclusive == 0,
    })
}

/// Reinterprets an estimate taken with a lossy receiver of efficiency `eta`
/// as that of a lossless receiver probed with amplitude `sqrt(eta) alpha`.
///
/// Loss commutes with the measurement, so the counts are unchanged and only
/// the comparison amplitude moves.
pub fn inefficiency_correct(estimate: &RateEstimate, eta: f64) -> Result<RateEstimate> {
    check_probability("eta", eta)?;
    if eta == 0.0 {
        return Err(Error::Domain {
            name: "eta",
            value: eta,
            expected: "> 0",
        });
    }
    Ok(RateEstimate {
        comparison_alpha: estimate.comparison_alpha * eta.sqrt(),
        ..*estimate
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emulator::Decision;

    fn record(truth: Hypothesis, d: Decision) -> TrialRecord {
        TrialRecord {
            index: 0,
            true_state: truth,
            x: 0.0,
            n: 0,
            hd_decision: d,
            pnr_decision: d,
        }
    }

    #[test]
    fn wilson_zero_successes() {
        let (lo, hi) = wilson_interval(0, 100, WILSON_Z_95).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036_993_5).abs() < 1e-6);
    }

    #[test]
    fn wilson_symmetric_and_contains_mle() {
        let (lo, hi) = wilson_interval(30, 100, 2.0).unwrap();
        assert!(lo < 0.3 && 0.3 < hi);
        let (lo2, hi2) = wilson_interval(70, 100, 2.0).unwrap();
        assert!((lo - (1.0 - hi2)).abs() < 1e-15);
        assert!((hi - (1.0 - lo2)).abs() < 1e-15);
        assert!(wilson_interval(1, 0, 2.0).is_err());
        assert!(wilson_interval(3, 2, 2.0).is_err());
    }

    #[test]
    fn counts_rates() {
        let mut rs = vec![record(Hypothesis::Minus, Decision::Minus); 6];
        rs.push(record(Hypothesis::Minus, Decision::Plus));
        rs.push(record(Hypothesis::Plus, Decision::Inconclusive));
        rs.push(record(Hypothesis::Plus, Decision::Plus));
        rs.push(record(Hypothesis::Plus, Decision::Minus));
        let e = estimate_rates(&rs, Receiver::Pnr, &EstimationContext::new(0.5)).unwrap();
        assert_eq!(e.n_conclusive, 9);
        assert_eq!(e.n_errors, 2);
        assert!((e.p_err.unwrap().value - 2.0 / 9.0).abs() < 1e-15);
        assert!((e.p_inc.value - 0.1).abs() < 1e-15);
        assert!((e.p_err_given_minus.unwrap().value - 1.0 / 7.0).abs() < 1e-15);
        assert!((e.p_inc_given_plus.unwrap().value - 1.0 / 3.0).abs() < 1e-15);
        assert!(!e.undefined);
    }

    #[test]
    fn all_inconclusive_is_undefined() {
        let rs = vec![record(Hypothesis::Plus, Decision::Inconclusive); 5];
        let e = estimate_rates(&rs, Receiver::Homodyne, &EstimationContext::new(0.5)).unwrap();
        assert!(e.undefined);
        assert!(e.p_err.is_none());
        assert!(e.p_err_given_minus.is_none());
        assert_eq!(e.p_inc.value, 1.0);
        assert!(estimate_rates(&[], Receiver::Pnr, &EstimationContext::new(0.5)).is_err());
    }

    #[test]
    fn correction_moves_only_amplitude() {
        let rs = vec![record(Hypothesis::Minus, Decision::Minus); 4];
        let e = estimate_rates(&rs, Receiver::Pnr, &EstimationContext::new(0.8)).unwrap();
        let c = inefficiency_correct(&e, 0.25).unwrap();
        assert!((c.comparison_alpha - 0.4).abs() < 1e-15);
        assert_eq!(c.p_inc, e.p_inc);
        assert!(inefficiency_correct(&e, 0.0).is_err());
        assert!(inefficiency_correct(&e, 1.5).is_err());
    }
}
