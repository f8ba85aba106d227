use std::path::PathBuf;

use anyhow::{Context, Result};
use cohdisc::emulator::{
    estimate_rates, inefficiency_correct, simulate_parallel, EstimationContext, ExperimentConfig,
    Receiver,
};
use serde::Serialize;
use serde_json::Value;

use crate::output::{csv_text, fmt_g, Sink};
use crate::UsageError;

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    /// JSON experiment description (missing fields take laboratory defaults).
    #[arg(long)]
    config: PathBuf,
    /// Number of pulses; overrides the config.
    #[arg(long)]
    trials: Option<u64>,
    /// RNG seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

/// Reads a config, filling every missing field (nested ones included) from
/// the laboratory defaults. `alpha` is required.
fn parse_config(text: &str) -> Result<ExperimentConfig, String> {
    let user: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if user.get("alpha").is_none() {
        return Err("missing field `alpha`".into());
    }
    let mut merged = serde_json::to_value(ExperimentConfig::experimental(0.0, 0.0, 1.0, 0))
        .map_err(|e| e.to_string())?;
    merge(&mut merged, user);
    serde_json::from_value(merged).map_err(|e| e.to_string())
}

fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

const RECORD_HEADER: [&str; 6] = [
    "index",
    "true_state",
    "x",
    "n",
    "hd_decision",
    "pnr_decision",
];

pub fn run(args: Args, sink: &Sink) -> Result<()> {
    if matches!(sink, Sink::Stdout) {
        return Err(UsageError("montecarlo needs --out-dir or COHDISC_OUT_DIR".into()).into());
    }
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut config =
        parse_config(&text).map_err(|e| UsageError(format!("{}: {e}", args.config.display())))?;
    if let Some(n) = args.trials {
        config.n_trials = n;
    }
    if let Some(seed) = args.seed {
        config.rng_seed = seed;
    }
    if config.n_trials == 0 {
        return Err(UsageError("--trials must be at least 1".into()).into());
    }
    config.validate()?;

    let records = simulate_parallel(&config)?;
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.index.to_string(),
                r.true_state.as_str().into(),
                fmt_g(r.x),
                r.n.to_string(),
                r.hd_decision.as_str().into(),
                r.pnr_decision.as_str().into(),
            ]
        })
        .collect();

    let (hd_exact, pnr_exact) = config.analytic_rates()?;
    let ctx = EstimationContext::new(config.alpha);
    let homodyne = estimate_rates(&records, Receiver::Homodyne, &ctx)?;
    let pnr = estimate_rates(&records, Receiver::Pnr, &ctx)?;
    let report = serde_json::json!({
        "config": config,
        "wilson_z": ctx.z,
        "homodyne": {
            "estimate": homodyne,
            "analytic": hd_exact,
            "efficiency_corrected": inefficiency_correct(&homodyne, config.homodyne.efficiency)?,
        },
        "pnr": {
            "estimate": pnr,
            "analytic": pnr_exact,
            "efficiency_corrected": inefficiency_correct(&pnr, config.pnr.efficiency)?,
        },
        "efficiency_correction": "comparison amplitude relabeled to sqrt(efficiency) * alpha; counts unchanged",
    });
    let mut report_text = serde_json::to_vec_pretty(&report)?;
    report_text.push(b'\n');
    let mut config_text = serde_json::to_vec_pretty(&config)?;
    config_text.push(b'\n');
    sink.emit(
        "montecarlo",
        Some(config.rng_seed),
        config,
        &[
            ("records.csv", csv_text(&RECORD_HEADER, &rows)?),
            ("config.json", config_text),
            ("report.json", report_text),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_receiver_objects_keep_lab_defaults() {
        let c =
            parse_config(r#"{"alpha": 0.5, "pnr": {"m": 2}, "homodyne": {"threshold_b": 0.3}}"#)
                .unwrap();
        assert_eq!(c.pnr.m, 2);
        assert_eq!(c.pnr.efficiency, 0.55);
        assert_eq!(c.homodyne.threshold_b, 0.3);
        assert_eq!(c.homodyne.efficiency, 0.858);
        assert!(parse_config(r#"{"pnr": {"m": 2}}"#).is_err());
        assert!(parse_config(r#"{"alpha": 0.5, "pnr": {"gain": 2}}"#).is_err());
    }
}
