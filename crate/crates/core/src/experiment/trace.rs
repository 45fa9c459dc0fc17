use std::path::Path;

use serde::Serialize;

use crate::channel::power_dbfs;
use crate::error::{Error, Result};

pub const DEFAULT_BLOCK_LEN: usize = 10_000;

/// Contents of one trace file.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasuredTrace {
    /// Raw I/Q samples (`i,q` header).
    Samples(Vec<(i32, i32)>),
    /// Per-iteration received powers (`pb_dbfs,pe_dbfs` header).
    Summary(Vec<(f64, f64)>),
}

fn parse_err(path: &str, line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        reason: reason.into(),
    }
}

/// Parses trace text; `path` is only used in error messages. Lines are 1-based
/// and blank lines or `#` comments are skipped.
pub fn parse_trace(text: &str, path: &str) -> Result<MeasuredTrace> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| Error::Empty(format!("{path}: no header")))?;
    let columns: Vec<String> = header
        .split(',')
        .map(|c| c.trim().to_ascii_lowercase())
        .collect();
    let fields = |line: usize, l: &str| -> Result<(String, String)> {
        let parts: Vec<&str> = l.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(parse_err(
                path,
                line,
                format!("expected 2 fields, found {}", parts.len()),
            ));
        }
        Ok((parts[0].to_string(), parts[1].to_string()))
    };
    match columns
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .as_slice()
    {
        ["i", "q"] => {
            let mut samples = Vec::new();
            for (line, l) in lines {
                let (a, b) = fields(line, l)?;
                let mut pair = [0i32; 2];
                for (slot, s) in pair.iter_mut().zip([&a, &b]) {
                    let v: i64 = s.parse().map_err(|_| {
                        parse_err(path, line, format!("'{s}' is not an integer sample"))
                    })?;
                    if v <= crate::channel::ADC_MIN_EXCLUSIVE || v > crate::channel::ADC_MAX {
                        return Err(Error::SampleRange { line, value: v });
                    }
                    *slot = v as i32;
                }
                samples.push((pair[0], pair[1]));
            }
            if samples.is_empty() {
                return Err(Error::Empty(format!("{path}: no samples")));
            }
            Ok(MeasuredTrace::Samples(samples))
        }
        ["pb_dbfs", "pe_dbfs"] => {
            let mut rows = Vec::new();
            for (line, l) in lines {
                let (a, b) = fields(line, l)?;
                let parse = |s: &str| -> Result<f64> {
                    let v: f64 = s
                        .parse()
                        .map_err(|_| parse_err(path, line, format!("'{s}' is not a number")))?;
                    if v.is_nan() || v == f64::INFINITY {
                        return Err(parse_err(
                            path,
                            line,
                            format!("'{s}' is not a power reading"),
                        ));
                    }
                    Ok(v)
                };
                rows.push((parse(&a)?, parse(&b)?));
            }
            if rows.is_empty() {
                return Err(Error::Empty(format!("{path}: no readings")));
            }
            Ok(MeasuredTrace::Summary(rows))
        }
        _ => Err(parse_err(
            path,
            header_line,
            format!("unrecognized header '{header}' (expected 'i,q' or 'pb_dbfs,pe_dbfs')"),
        )),
    }
}

pub fn read_trace(path: &Path) -> Result<MeasuredTrace> {
    let text = std::fs::read_to_string(path)?;
    parse_trace(&text, &path.display().to_string())
}

/// dBFS of consecutive blocks of `block_len` samples; a shorter tail forms its own block.
pub fn block_dbfs(samples: &[(i32, i32)], block_len: usize) -> Result<Vec<f64>> {
    if block_len == 0 {
        return Err(Error::Domain("block length must be at least 1".into()));
    }
    if samples.is_empty() {
        return Err(Error::Empty("no samples".into()));
    }
    samples.chunks(block_len).map(power_dbfs).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseFloorReport {
    pub bob_blocks: usize,
    pub eve_blocks: usize,
    pub mean_bob_dbfs: f64,
    pub mean_eve_dbfs: f64,
    /// Bob's mean minus Eve's mean.
    pub difference_db: f64,
    pub neglect_noise_difference: bool,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Compares the mean noise floors of two sets of block powers.
pub fn noise_floor_report(bob_dbfs: &[f64], eve_dbfs: &[f64]) -> Result<NoiseFloorReport> {
    if bob_dbfs.is_empty() || eve_dbfs.is_empty() {
        return Err(Error::Empty(
            "noise floor needs readings for both receivers".into(),
        ));
    }
    if bob_dbfs.iter().chain(eve_dbfs).any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "noise floor readings must be finite (an all-zero block has no floor)".into(),
        ));
    }
    let mean_bob_dbfs = mean(bob_dbfs);
    let mean_eve_dbfs = mean(eve_dbfs);
    Ok(NoiseFloorReport {
        bob_blocks: bob_dbfs.len(),
        eve_blocks: eve_dbfs.len(),
        mean_bob_dbfs,
        mean_eve_dbfs,
        difference_db: mean_bob_dbfs - mean_eve_dbfs,
        neglect_noise_difference: true,
    })
}

/// Secrecy capacity per reading from dBFS powers. With `noise_difference_db`
/// set to `N_b − N_e` in dB the noise term is included; `None` treats the
/// noise powers as equal.
pub fn secrecy_trace(readings: &[(f64, f64)], noise_difference_db: Option<f64>) -> Vec<f64> {
    let offset = noise_difference_db.unwrap_or(0.0);
    readings
        .iter()
        .map(|&(pb, pe)| ((pb - pe - offset) / (10.0 * 2f64.log10())).max(0.0))
        .collect()
}
