//! Versioned JSON and CSV outputs.
//!
//! JSON reports are wrapped in an [`Envelope`] that records the format
//! version, the command, its full configuration and the seed. CSV files start
//! with `#` comment lines carrying the same information, followed by a fixed
//! header row.

use std::io::Write;
use std::path::Path;

use heisenberg_hardy::metrics::HorizontalPath;
use heisenberg_hardy::sharpness::ConvergenceRecord;
use serde::Serialize;

pub const FORMAT_VERSION: u32 = 1;

/// Column names of the convergence CSV.
pub const CONVERGENCE_COLUMNS: [&str; 6] = ["step", "epsilon", "R", "lambda", "quotient", "margin"];

#[derive(Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub format_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub config: &'a C,
    pub result: &'a R,
}

impl<'a, C: Serialize, R: Serialize> Envelope<'a, C, R> {
    pub fn new(command: &'a str, seed: u64, config: &'a C, result: &'a R) -> Self {
        Envelope {
            format_version: FORMAT_VERSION,
            tool: "hhardy",
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config,
            result,
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

fn csv_preamble<C: Serialize>(kind: &str, seed: u64, config: &C) -> serde_json::Result<String> {
    Ok(format!(
        "# hhardy {kind} format_version={FORMAT_VERSION}\n# seed={seed}\n# config={}\n",
        serde_json::to_string(config)?
    ))
}

fn finish_csv(preamble: String, w: csv::Writer<Vec<u8>>) -> std::io::Result<String> {
    let body = w.into_inner().map_err(|e| e.into_error())?;
    let mut out = preamble.into_bytes();
    out.extend(body);
    String::from_utf8(out).map_err(std::io::Error::other)
}

/// One row per schedule step with columns [`CONVERGENCE_COLUMNS`].
pub fn convergence_csv<C: Serialize>(record: &ConvergenceRecord, seed: u64, config: &C) -> std::io::Result<String> {
    let preamble = csv_preamble("convergence", seed, config)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CONVERGENCE_COLUMNS)?;
    for (k, (a, q)) in record.parameters.iter().zip(&record.quotients).enumerate() {
        w.write_record([
            k.to_string(),
            a.epsilon.to_string(),
            a.spread.to_string(),
            a.lambda.to_string(),
            q.to_string(),
            (q - record.target).to_string(),
        ])?;
    }
    finish_csv(preamble, w)
}

/// Path vertices with columns `k, x_1..x_n, y_1..y_n, t`.
pub fn path_csv<C: Serialize>(path: &HorizontalPath, seed: u64, config: &C) -> std::io::Result<String> {
    let preamble = csv_preamble("path", seed, config)?;
    let verts = path.vertices();
    let n = path.start.dim();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["k".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=n).map(|i| format!("y{i}")));
    header.push("t".into());
    w.write_record(&header)?;
    for (k, v) in verts.iter().enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(v.coords().iter().map(|c| c.to_string()));
        w.write_record(&row)?;
    }
    finish_csv(preamble, w)
}

/// Writes `contents` to `path` in one call.
pub fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())
}
