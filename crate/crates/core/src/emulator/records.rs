use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::signal::Hypothesis;

use super::{Decision, TrialRecord};

pub const CSV_HEADER: &str = "index,true_state,x,n,hd_decision,pnr_decision";

/// Writes `records` as CSV. Quadratures use the shortest representation
/// that round-trips exactly.
pub fn write_records_csv<W: Write>(
    mut out: W,
    records: impl IntoIterator<Item = TrialRecord>,
) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{:?},{},{},{}",
            r.index,
            r.true_state.as_str(),
            r.x,
            r.n,
            r.hd_decision.as_str(),
            r.pnr_decision.as_str()
        )?;
    }
    Ok(())
}

fn parse_hypothesis(s: &str) -> Option<Hypothesis> {
    match s {
        "minus" => Some(Hypothesis::Minus),
        "plus" => Some(Hypothesis::Plus),
        _ => None,
    }
}

fn parse_decision(s: &str) -> Option<Decision> {
    match s {
        "minus" => Some(Decision::Minus),
        "plus" => Some(Decision::Plus),
        "inconclusive" => Some(Decision::Inconclusive),
        _ => None,
    }
}

/// Reads records written by [`write_records_csv`].
pub fn read_records_csv<R: BufRead>(input: R) -> Result<Vec<TrialRecord>> {
    let mut lines = input.lines();
    let bad = |line: usize, what: &str| Error::InvalidConfig(format!("line {line}: {what}"));
    match lines.next() {
        Some(Ok(h)) if h.trim_end() == CSV_HEADER => {}
        _ => return Err(bad(1, "missing header")),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.map_err(|e| bad(lineno, &e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 6 {
            return Err(bad(lineno, "expected 6 fields"));
        }
        out.push(TrialRecord {
            index: f[0].parse().map_err(|_| bad(lineno, "index"))?,
            true_state: parse_hypothesis(f[1]).ok_or_else(|| bad(lineno, "true_state"))?,
            x: f[2].parse().map_err(|_| bad(lineno, "x"))?,
            n: f[3].parse().map_err(|_| bad(lineno, "n"))?,
            hd_decision: parse_decision(f[4]).ok_or_else(|| bad(lineno, "hd_decision"))?,
            pnr_decision: parse_decision(f[5]).ok_or_else(|| bad(lineno, "pnr_decision"))?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emulator::{simulate, ExperimentConfig};

    #[test]
    fn round_trip() {
        let cfg = ExperimentConfig::experimental(0.7, 0.2, 1.1, 1).with_trials(500, 5);
        let records = simulate(&cfg).unwrap();
        let mut buf = Vec::new();
        write_records_csv(&mut buf, records.iter().copied()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        let back = read_records_csv(&buf[..]).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_records_csv(&b"a,b\n"[..]).is_err());
        let text = format!("{CSV_HEADER}\n0,up,0.1,0,plus,plus\n");
        assert!(read_records_csv(text.as_bytes()).is_err());
    }
}
