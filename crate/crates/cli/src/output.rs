//! CSV rows and witness sidecars.

use std::fmt::Write as _;
use std::io::{ErrorKind, Write as _};
use std::path::{Path, PathBuf};

use qbroadcast::region::{FrontierMeta, RegionKind};
use qbroadcast::{Frontier, RatePoint};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::spec::ChannelSpecDocument;

pub const CSV_HEADER: &str = "common_rate,personal_rate,witness_id";
pub const SIGNIFICANT_DIGITS: usize = 12;

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed,
/// exponent form outside `[1e-4, 1e12)`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn frontier_csv(points: &[RatePoint]) -> String {
    let mut out = String::with_capacity(32 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(out, "{},{},{}", format_number(p.common_rate), format_number(p.personal_rate), p.witness.id);
    }
    out
}

/// Parses CSV written by [`frontier_csv`] back into `(common, personal, id)`.
pub fn parse_csv(text: &str) -> CliResult<Vec<(f64, f64, usize)>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(CliError::validate(format!("csv: expected header {CSV_HEADER:?}")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || CliError::validate(format!("csv: line {}: malformed row {line:?}", i + 2));
            let mut cols = line.split(',');
            let (Some(a), Some(b), Some(id), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
                return Err(bad());
            };
            Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?, id.parse().map_err(|_| bad())?))
        })
        .collect()
}

/// Everything needed to re-evaluate the rows of a CSV file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessFile {
    pub channel: ChannelSpecDocument,
    pub kind: RegionKind,
    pub k: usize,
    pub meta: FrontierMeta,
    /// Oracle mesh error, when the frontier came from an oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh_error: Option<f64>,
    pub points: Vec<RatePoint>,
}

impl WitnessFile {
    pub fn new(channel: ChannelSpecDocument, frontier: &Frontier) -> Self {
        WitnessFile {
            channel,
            kind: frontier.meta.kind,
            k: frontier.meta.k,
            meta: frontier.meta.clone(),
            mesh_error: None,
            points: frontier.points.clone(),
        }
    }
}

/// `<out>.witness.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".witness.json");
    PathBuf::from(s)
}

/// Writes the CSV to `out` (or standard output) and the witness sidecar next
/// to it.
pub fn emit(out: Option<&Path>, witnesses: &WitnessFile) -> CliResult<()> {
    let csv = frontier_csv(&witnesses.points);
    match out {
        Some(path) => {
            std::fs::write(path, csv)?;
            let json = serde_json::to_string_pretty(witnesses)?;
            std::fs::write(sidecar_path(path), json + "\n")?;
        }
        None => write_stdout(&csv)?,
    }
    Ok(())
}

/// Writes to standard output; a reader that went away (`qbc ... | head`) is
/// not an error.
pub fn write_stdout(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}
