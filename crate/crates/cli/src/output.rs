use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Formats `x` like C's `%.12g`.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    const DIGITS: i32 = 12;
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_default()
}

/// Renders a header and rows as CSV text.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().context("flushing CSV buffer")
}

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest<P: Serialize> {
    pub command: &'static str,
    pub tool_version: &'static str,
    pub seed: Option<u64>,
    pub parameters: P,
    pub outputs: Vec<OutputFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<OutputFile> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    let target = dir.join(name);
    tmp.persist(&target)
        .with_context(|| format!("writing {}", target.display()))?;
    Ok(OutputFile {
        file: name.into(),
        bytes: bytes.len(),
        sha256: sha256_hex(bytes),
    })
}

/// Where a command sends its results.
pub enum Sink {
    Stdout,
    Directory(PathBuf),
}

impl Sink {
    pub fn new(out_dir: Option<PathBuf>) -> Self {
        out_dir.map_or(Sink::Stdout, Sink::Directory)
    }

    /// Emits `files` and, for a directory sink, a manifest next to them.
    pub fn emit<P: Serialize>(
        &self,
        command: &'static str,
        seed: Option<u64>,
        parameters: P,
        files: &[(&str, Vec<u8>)],
    ) -> Result<()> {
        match self {
            Sink::Stdout => {
                let mut out = std::io::stdout().lock();
                for (_, bytes) in files {
                    out.write_all(bytes)?;
                }
                Ok(())
            }
            Sink::Directory(dir) => {
                let outputs = files
                    .iter()
                    .map(|(name, bytes)| write_atomic(dir, name, bytes))
                    .collect::<Result<Vec<_>>>()?;
                let manifest = RunManifest {
                    command,
                    tool_version: env!("CARGO_PKG_VERSION"),
                    seed,
                    parameters,
                    outputs,
                };
                let mut text = serde_json::to_vec_pretty(&manifest)?;
                text.push(b'\n');
                write_atomic(dir, "manifest.json", &text)?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format() {
        assert_eq!(fmt_g(0.1), "0.1");
        assert_eq!(fmt_g(0.1 + 0.2), "0.3");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(-2.5), "-2.5");
        assert_eq!(fmt_g(0.220_864_553_688_114), "0.220864553688");
        assert_eq!(fmt_g(1.234_567_890_123_4e-7), "1.23456789012e-07");
        assert_eq!(fmt_g(123_456_789_012_345.0), "1.23456789012e+14");
        assert_eq!(fmt_g(0.000_012_5), "1.25e-05");
        assert_eq!(fmt_g(0.000_125), "0.000125");
        assert_eq!(fmt_g(999_999_999_999.5), "1e+12");
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(f64::NAN), "nan");
    }

    #[test]
    fn atomic_write_and_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let f = write_atomic(dir.path(), "a.txt", b"abc").unwrap();
        assert_eq!(
            f.sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(fs::read(dir.path().join("a.txt")).unwrap(), b"abc");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
