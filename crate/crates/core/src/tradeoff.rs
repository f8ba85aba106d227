//! Displacement optimization for the PNR receiver and the
//! matched-inconclusive comparison against postselected homodyne detection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{optimal_id_bound, usd_inconclusive_rate};
use crate::error::{Error, Result};
use crate::optimize::{bisect, scan_then_refine};
use crate::receivers::{
    homodyne_receiver, pnr_receiver, HomodyneReceiverConfig, PnrReceiverConfig,
};
use crate::signal::{DiscriminationResult, SignalEnsemble};

/// Number of samples in the displacement pre-scan.
pub const BETA_SCAN_POINTS: usize = 200;
/// Golden-section refinement steps after the scan.
pub const BETA_REFINE_STEPS: usize = 40;
pub const BETA_TOLERANCE: f64 = 1e-6;
/// Inconclusive-rate agreement demanded from [`match_inconclusive`].
pub const MATCH_TOLERANCE: f64 = 1e-10;

/// Optimized displacement and the rates it achieves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementOptimum {
    pub beta: f64,
    pub rates: DiscriminationResult,
    /// Strict local minima of `p_err(beta)` seen on the pre-scan grid.
    pub scan_local_minima: usize,
}

/// Displacement minimizing the conditional error for threshold `m`.
///
/// `template` supplies everything but the displacement. The search scans
/// `[0, alpha + 5]` (doubling the range while the best sample sits on its
/// upper edge) and refines the best sample by golden-section search.
pub fn optimize_displacement(
    ensemble: &SignalEnsemble,
    m: u32,
    template: &PnrReceiverConfig,
) -> Result<DisplacementOptimum> {
    let base = PnrReceiverConfig { m, ..*template };
    base.validate()?;
    let objective = |beta: f64| {
        pnr_receiver(ensemble, &base.with_beta(beta))
            .ok()
            .and_then(|r| r.p_err)
            .unwrap_or(1.0)
    };
    let mut beta_max = ensemble.alpha() + 5.0;
    let found = loop {
        let found = scan_then_refine(
            objective,
            0.0,
            beta_max,
            BETA_SCAN_POINTS,
            BETA_REFINE_STEPS,
            BETA_TOLERANCE,
        );
        let step = beta_max / (BETA_SCAN_POINTS - 1) as f64;
        if found.x < beta_max - step || beta_max > 1e3 {
            break found;
        }
        beta_max *= 2.0;
    };
    let beta = if found.flat { 0.0 } else { found.x };
    Ok(DisplacementOptimum {
        beta,
        rates: pnr_receiver(ensemble, &base.with_beta(beta))?,
        scan_local_minima: found.local_minima,
    })
}

/// Homodyne threshold whose inconclusive rate equals `target`.
pub fn homodyne_threshold_for_inconclusive(
    ensemble: &SignalEnsemble,
    template: &HomodyneReceiverConfig,
    target: f64,
) -> Result<(f64, DiscriminationResult)> {
    if !(0.0..1.0).contains(&target) {
        return Err(Error::Domain {
            name: "p_inc",
            value: target,
            expected: "[0, 1)",
        });
    }
    let rates_at = |b: f64| {
        homodyne_receiver(
            ensemble,
            &HomodyneReceiverConfig {
                threshold_b: b,
                ..*template
            },
        )
    };
    if target == 0.0 {
        return Ok((0.0, rates_at(0.0)?));
    }
    let mut hi = 1.0;
    while rates_at(hi)?.p_inc < target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numerical(format!(
                "no homodyne threshold reaches p_inc = {target}"
            )));
        }
    }
    let b = bisect(
        |b| rates_at(b).map(|r| r.p_inc - target).unwrap_or(f64::NAN),
        0.0,
        hi,
        MATCH_TOLERANCE,
    )?;
    let rates = rates_at(b)?;
    if (rates.p_inc - target).abs() >= MATCH_TOLERANCE {
        return Err(Error::Numerical(format!(
            "threshold search stalled at |dp_inc| = {:e}",
            (rates.p_inc - target).abs()
        )));
    }
    Ok((b, rates))
}

/// Matched comparison: the ideal homodyne threshold `B` with the same
/// inconclusive rate as the given PNR receiver.
pub fn match_inconclusive(
    ensemble: &SignalEnsemble,
    pnr: &PnrReceiverConfig,
) -> Result<(f64, DiscriminationResult)> {
    match_inconclusive_with(ensemble, pnr, &HomodyneReceiverConfig::ideal(0.0))
}

/// [`match_inconclusive`] against a homodyne receiver with the
/// imperfections of `homodyne`.
pub fn match_inconclusive_with(
    ensemble: &SignalEnsemble,
    pnr: &PnrReceiverConfig,
    homodyne: &HomodyneReceiverConfig,
) -> Result<(f64, DiscriminationResult)> {
    let target = pnr_receiver(ensemble, pnr)?.p_inc;
    if target >= 1.0 {
        return Err(Error::Undefined("PNR receiver is never conclusive"));
    }
    homodyne_threshold_for_inconclusive(ensemble, homodyne, target)
}

/// What generated a curve point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveParameter {
    Threshold { b: f64 },
    Displacement { beta: f64, m: u32 },
    InconclusiveTarget { p_inc: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub p_inc: f64,
    pub p_err: f64,
    pub parameter: CurveParameter,
}

/// Error rate against inconclusive rate, ordered by increasing `p_inc`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TradeoffCurve {
    pub points: Vec<CurvePoint>,
}

impl TradeoffCurve {
    /// Sorts by inconclusive rate and drops points that do not increase it.
    pub fn from_points(mut points: Vec<CurvePoint>) -> Self {
        points.sort_by(|a, b| a.p_inc.total_cmp(&b.p_inc));
        points.dedup_by(|b, a| b.p_inc <= a.p_inc);
        Self { points }
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].p_inc > w[0].p_inc)
    }
}

/// All ideal-theory curves at one signal amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSweep {
    pub alpha_sq: f64,
    pub kennedy: DiscriminationResult,
    /// PNR receivers with optimized displacement, one per threshold.
    pub pnr: Vec<(u32, DisplacementOptimum)>,
    /// Homodyne receiver on the supplied threshold grid.
    pub homodyne: TradeoffCurve,
    /// Homodyne receiver matched to each PNR inconclusive rate.
    pub homodyne_matched: TradeoffCurve,
    /// Optimal intermediate measurement at each PNR inconclusive rate.
    pub optimal_id: TradeoffCurve,
}

impl AmplitudeSweep {
    pub fn pnr_curve(&self) -> TradeoffCurve {
        TradeoffCurve::from_points(
            self.pnr
                .iter()
                .filter_map(|(m, opt)| {
                    Some(CurvePoint {
                        p_inc: opt.rates.p_inc,
                        p_err: opt.rates.p_err?,
                        parameter: CurveParameter::Displacement {
                            beta: opt.beta,
                            m: *m,
                        },
                    })
                })
                .collect(),
        )
    }
}

/// Ideal-theory curves for each amplitude in `alpha_sq_grid`: Kennedy,
/// PNR with optimized displacement per `m`, homodyne over `b_grid`, the
/// homodyne receiver matched to each PNR point, and the optimal
/// intermediate measurement at the same inconclusive rates.
pub fn sweep_curves(
    prior_minus: f64,
    alpha_sq_grid: &[f64],
    m_list: &[u32],
    b_grid: &[f64],
) -> Result<Vec<AmplitudeSweep>> {
    if alpha_sq_grid.is_empty() || m_list.is_empty() || b_grid.is_empty() {
        return Err(Error::InvalidConfig("sweep grids must be non-empty".into()));
    }
    alpha_sq_grid
        .par_iter()
        .map(|&alpha_sq| sweep_amplitude(prior_minus, alpha_sq, m_list, b_grid))
        .collect()
}

fn sweep_amplitude(
    prior_minus: f64,
    alpha_sq: f64,
    m_list: &[u32],
    b_grid: &[f64],
) -> Result<AmplitudeSweep> {
    if alpha_sq.is_nan() || alpha_sq < 0.0 {
        return Err(Error::Domain {
            name: "alpha_sq",
            value: alpha_sq,
            expected: ">= 0",
        });
    }
    let ensemble = SignalEnsemble::with_prior_minus(alpha_sq.sqrt(), prior_minus)?;
    let kennedy = pnr_receiver(&ensemble, &PnrReceiverConfig::kennedy(ensemble.alpha()))?;
    let template = PnrReceiverConfig::ideal(0.0, 0);
    let pnr = m_list
        .iter()
        .map(|&m| Ok((m, optimize_displacement(&ensemble, m, &template)?)))
        .collect::<Result<Vec<_>>>()?;

    let homodyne = TradeoffCurve::from_points(
        b_grid
            .iter()
            .map(|&b| {
                let r = homodyne_receiver(&ensemble, &HomodyneReceiverConfig::ideal(b))?;
                Ok(r.p_err.map(|p_err| CurvePoint {
                    p_inc: r.p_inc,
                    p_err,
                    parameter: CurveParameter::Threshold { b },
                }))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect(),
    );

    let limit = usd_inconclusive_rate(&ensemble);
    let mut matched = Vec::new();
    let mut bound = Vec::new();
    for (_, opt) in &pnr {
        let target = opt.rates.p_inc;
        if target >= 1.0 {
            continue;
        }
        let (b, hd) = homodyne_threshold_for_inconclusive(
            &ensemble,
            &HomodyneReceiverConfig::ideal(0.0),
            target,
        )?;
        if let Some(p_err) = hd.p_err {
            matched.push(CurvePoint {
                p_inc: hd.p_inc,
                p_err,
                parameter: CurveParameter::Threshold { b },
            });
        }
        if target <= limit {
            let id = optimal_id_bound(&ensemble, target)?;
            bound.push(CurvePoint {
                p_inc: target,
                p_err: id.p_err_min,
                parameter: CurveParameter::InconclusiveTarget { p_inc: target },
            });
        }
    }

    Ok(AmplitudeSweep {
        alpha_sq,
        kennedy,
        pnr,
        homodyne,
        homodyne_matched: TradeoffCurve::from_points(matched),
        optimal_id: TradeoffCurve::from_points(bound),
    })
}
