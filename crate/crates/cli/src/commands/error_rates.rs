use anyhow::Result;
use cohdisc::receivers::DEFAULT_COUNT_CAP;
use cohdisc::tradeoff::optimize_displacement;
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
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    m: Vec<u32>,
    /// Laboratory detector (55 % efficiency, 1/700 extinction) instead of an
    /// ideal one.
    #[arg(long, conflicts_with = "ideal")]
    experimental_defaults: bool,
    /// Ideal detector (the default).
    #[arg(long)]
    ideal: bool,
    /// Also emit a Kennedy row (beta = alpha, m = 0) per amplitude.
    #[arg(long)]
    kennedy: bool,
}

pub const HEADER: [&str; 6] = ["alpha_sq", "receiver", "m", "beta_opt", "p_err", "p_inc"];

pub fn run(args: Args, sink: &Sink) -> Result<()> {
    let grid: Vec<f64> = args.alpha_sq.0.clone();
    check_alpha_sq(&grid)?;
    if let Some(m) = args.m.iter().find(|&&m| m >= DEFAULT_COUNT_CAP) {
        return Err(UsageError(format!(
            "m = {m} must be below the count cap {DEFAULT_COUNT_CAP}"
        ))
        .into());
    }
    let template = |beta, m| {
        if args.experimental_defaults {
            PnrReceiverConfig::experimental(beta, m)
        } else {
            PnrReceiverConfig::ideal(beta, m)
        }
    };
    let mut rows = Vec::new();
    for &alpha_sq in &grid {
        let e = SignalEnsemble::from_mean_photons(alpha_sq)?;
        if args.kennedy {
            let r = pnr_receiver(&e, &template(e.alpha(), 0))?;
            rows.push(vec![
                fmt_g(alpha_sq),
                "kennedy".into(),
                "0".into(),
                fmt_g(e.alpha()),
                fmt_opt(r.p_err),
                fmt_g(r.p_inc),
            ]);
        }
        for &m in &args.m {
            let opt = optimize_displacement(&e, m, &template(0.0, m))?;
            rows.push(vec![
                fmt_g(alpha_sq),
                "pnr".into(),
                m.to_string(),
                fmt_g(opt.beta),
                fmt_opt(opt.rates.p_err),
                fmt_g(opt.rates.p_inc),
            ]);
        }
    }
    let detector = if args.experimental_defaults {
        "experimental"
    } else {
        "ideal"
    };
    let params = serde_json::json!({
        "alpha_sq": grid,
        "m": args.m,
        "detector": detector,
        "kennedy": args.kennedy,
    });
    sink.emit(
        "error-rates",
        None,
        params,
        &[("error_rates.csv", csv_text(&HEADER, &rows)?)],
    )
}
