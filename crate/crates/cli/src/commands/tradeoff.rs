use anyhow::Result;
use cohdisc::bounds::{optimal_id_bound, usd_bound};
use cohdisc::receivers::DEFAULT_COUNT_CAP;
use cohdisc::tradeoff::{match_inconclusive, optimize_displacement};
use cohdisc::{pnr_receiver, PnrReceiverConfig, SignalEnsemble};
use serde::Serialize;

use super::check_alpha_sq;
use crate::grid::{parse_grid_arg, Grid};
use crate::output::{csv_text, fmt_g, fmt_opt, Sink};
use crate::UsageError;

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Mean photon numbers: `start:stop:step`, a list, or one value.
    #[arg(long = "alpha2", value_parser = parse_grid_arg)]
    alpha_sq: Grid,
    /// PNR thresholds.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    m: Vec<u32>,
    /// Fixed displacement instead of the error-optimal one.
    #[arg(long)]
    beta: Option<f64>,
}

pub const HEADER: [&str; 9] = [
    "alpha_sq",
    "m",
    "beta",
    "b_matched",
    "p_inc",
    "acceptance",
    "p_err_pnr",
    "p_err_hd",
    "p_err_optimal_id",
];

pub fn run(args: Args, sink: &Sink) -> Result<()> {
    let grid: Vec<f64> = args.alpha_sq.0.clone();
    check_alpha_sq(&grid)?;
    if let Some(m) = args.m.iter().find(|&&m| m >= DEFAULT_COUNT_CAP) {
        return Err(UsageError(format!(
            "m = {m} must be below the count cap {DEFAULT_COUNT_CAP}"
        ))
        .into());
    }
    if let Some(beta) = args.beta.filter(|b| !(b.is_finite() && *b >= 0.0)) {
        return Err(UsageError(format!("beta must be a non-negative number, got {beta}")).into());
    }
    let mut rows = Vec::new();
    for &alpha_sq in &grid {
        let e = SignalEnsemble::from_mean_photons(alpha_sq)?;
        let usd = usd_bound(&e)?.p_inc;
        for &m in &args.m {
            let (beta, pnr) = match args.beta {
                Some(beta) => (beta, pnr_receiver(&e, &PnrReceiverConfig::ideal(beta, m))?),
                None => {
                    let opt = optimize_displacement(&e, m, &PnrReceiverConfig::ideal(0.0, m))?;
                    (opt.beta, opt.rates)
                }
            };
            let (b, hd) = match_inconclusive(&e, &PnrReceiverConfig::ideal(beta, m))?;
            // Beyond the unambiguous rate an error-free measurement exists.
            let id = if pnr.p_inc >= usd {
                Some(0.0)
            } else {
                Some(optimal_id_bound(&e, pnr.p_inc)?.p_err_min)
            };
            rows.push(vec![
                fmt_g(alpha_sq),
                m.to_string(),
                fmt_g(beta),
                fmt_g(b),
                fmt_g(pnr.p_inc),
                fmt_g(1.0 - pnr.p_inc),
                fmt_opt(pnr.p_err),
                fmt_opt(hd.p_err),
                fmt_opt(id),
            ]);
        }
    }
    let params = serde_json::json!({ "alpha_sq": grid, "m": args.m, "beta": args.beta });
    sink.emit(
        "tradeoff",
        None,
        params,
        &[("tradeoff.csv", csv_text(&HEADER, &rows)?)],
    )
}
