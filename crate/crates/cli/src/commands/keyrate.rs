use anyhow::Result;
use cohdisc::qkd::{key_rate_sweep, EveModel, KeyRateOptions, ReceiverKind};
use serde::Serialize;

use crate::grid::{parse_grid_arg, Grid};
use crate::output::{csv_text, fmt_g, fmt_opt, Sink};
use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Pnr,
    Homodyne,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Eve {
    Unconditioned,
    Postselected,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// Channel transmittances in (0, 1]: `start:stop:step`, a list, or one value.
    #[arg(long, value_parser = parse_grid_arg, default_value = "0.01,0.05,0.1,0.5,0.9,1")]
    eta: Grid,
    /// Receivers to optimize.
    #[arg(long, value_delimiter = ',', default_value = "pnr,homodyne")]
    receivers: Vec<Kind>,
    /// Largest PNR threshold tried.
    #[arg(long, default_value_t = 10)]
    m_cap: u32,
    /// Accounting of the eavesdropper's information. `postselected` is
    /// optimistic and can exceed the channel capacity.
    #[arg(long, value_enum, default_value = "unconditioned")]
    eve_model: Eve,
}

pub const HEADER: [&str; 9] = [
    "eta",
    "receiver",
    "G",
    "alpha_opt",
    "beta_opt",
    "m_opt",
    "p_err",
    "p_inc",
    "b_opt",
];

pub fn run(args: Args, sink: &Sink) -> Result<()> {
    let etas: Vec<f64> = args.eta.0.clone();
    if let Some(eta) = etas.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
        return Err(UsageError(format!("eta must lie in (0, 1], got {eta}")).into());
    }
    if args.m_cap > 30 {
        return Err(UsageError(format!("m-cap {} exceeds 30", args.m_cap)).into());
    }
    let options = KeyRateOptions {
        m_cap: args.m_cap,
        eve: match args.eve_model {
            Eve::Unconditioned => EveModel::Unconditioned,
            Eve::Postselected => EveModel::Postselected,
        },
        ..KeyRateOptions::default()
    };
    let mut rows = Vec::new();
    let mut kinds = args.receivers.clone();
    kinds.dedup();
    for kind in kinds {
        let (core_kind, label) = match kind {
            Kind::Pnr => (ReceiverKind::Pnr, "pnr"),
            Kind::Homodyne => (ReceiverKind::Homodyne, "homodyne"),
        };
        for p in key_rate_sweep(&etas, core_kind, &options)? {
            rows.push(vec![
                fmt_g(p.eta),
                label.into(),
                fmt_g(p.g),
                fmt_g(p.alpha_opt),
                fmt_opt(p.beta_opt),
                p.m_opt.map(|m| m.to_string()).unwrap_or_default(),
                fmt_opt(p.p_err),
                fmt_g(p.p_inc),
                fmt_opt(p.threshold_opt),
            ]);
        }
    }
    let params = serde_json::json!({
        "eta": etas,
        "receivers": args.receivers,
        "m_cap": args.m_cap,
        "eve_model": args.eve_model,
        "search": options,
    });
    sink.emit(
        "keyrate",
        None,
        params,
        &[("keyrate.csv", csv_text(&HEADER, &rows)?)],
    )
}
