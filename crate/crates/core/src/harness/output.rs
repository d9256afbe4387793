use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::runner::{Aggregate, DropFailure, DropSummary, MetricsReport};
pub use super::runner::MetricRow;
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::solvers::diagnostics::{write_trace_rows, TRACE_HEADER};

const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Content hashes of the deterministic outputs. `timing.json` is left out
/// since wall time differs between runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

#[derive(Serialize)]
struct DropEntry<'a> {
    drop: usize,
    #[serde(flatten)]
    summary: &'a DropSummary,
    warnings: &'a [String],
}

#[derive(Serialize)]
struct Summary<'a> {
    schema_version: u32,
    code_version: &'static str,
    scenario: &'a str,
    /// True when no drop produced metrics.
    zero_drop: bool,
    rng_algorithm: &'static str,
    seed: u64,
    sweep_index: usize,
    drops_requested: usize,
    drops_ok: usize,
    failures: &'a [DropFailure],
    aggregate: Option<&'a Aggregate>,
    drops: Vec<DropEntry<'a>>,
    config: &'a ExperimentConfig,
}

#[derive(Serialize)]
struct Timing {
    wall_time_s: f64,
    drop_elapsed_s: Vec<(usize, f64)>,
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::io(path, e.into())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    s.push('\n');
    fs::write(path, s).map_err(io_err(path))
}

fn write_metrics(path: &Path, report: &MetricsReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["drop", "metric", "index", "value"])
        .map_err(csv_err(path))?;
    for r in report.rows() {
        w.write_record([
            r.drop.to_string(),
            r.metric.clone(),
            r.index.to_string(),
            r.value.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_trace(path: &Path, report: &MetricsReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let mut header = vec!["drop"];
    header.extend(TRACE_HEADER);
    w.write_record(&header).map_err(csv_err(path))?;
    for d in &report.drops {
        write_trace_rows(&mut w, Some(d.drop), &d.trace).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_ccdf(path: &Path, report: &MetricsReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["threshold_db", "exceed_prob"])
        .map_err(csv_err(path))?;
    if let Some(c) = &report.ccdf {
        let min = report.config.output.ccdf_min_db;
        for (t, p) in c.thresholds_db.iter().zip(&c.exceed_prob) {
            if *t >= min {
                w.write_record([format!("{t:.2}"), p.to_string()])
                    .map_err(csv_err(path))?;
            }
        }
    }
    w.flush().map_err(io_err(path))
}

/// Rows sorted by logical frequency; `bin` is the FFT index.
fn write_psd(path: &Path, report: &MetricsReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["bin", "freq_offset_bins", "psd_db", "psd_windowed_db"])
        .map_err(csv_err(path))?;
    let n = report.psd_db.len();
    for off in 0..n {
        let bin = (off + n / 2) % n;
        let logical = off as i64 - (n / 2) as i64;
        let win = report
            .psd_windowed_db
            .as_ref()
            .map(|v| v[bin].to_string())
            .unwrap_or_default();
        w.write_record([
            bin.to_string(),
            logical.to_string(),
            report.psd_db[bin].to_string(),
            win,
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn hash_entry(dir: &Path, name: &str) -> Result<ManifestEntry> {
    let path = dir.join(name);
    let bytes = fs::read(&path).map_err(io_err(&path))?;
    Ok(ManifestEntry {
        file: name.to_string(),
        bytes: bytes.len() as u64,
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// Writes `summary.json`, `metrics.csv`, `trace.csv`, `ccdf.csv`, `psd.csv`,
/// `timing.json` and `manifest.json` into `out_dir`, creating it if needed.
pub fn write_outputs(report: &MetricsReport, out_dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let p = |name: &str| -> PathBuf { out_dir.join(name) };
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        code_version: env!("CARGO_PKG_VERSION"),
        scenario: &report.config.scenario,
        zero_drop: report.drops.is_empty(),
        rng_algorithm: RngStream::ALGORITHM,
        seed: report.config.seed,
        sweep_index: report.sweep_index,
        drops_requested: report.config.drops,
        drops_ok: report.drops.len(),
        failures: &report.failures,
        aggregate: report.aggregate.as_ref(),
        drops: report
            .drops
            .iter()
            .map(|d| DropEntry {
                drop: d.drop,
                summary: &d.summary,
                warnings: &d.warnings,
            })
            .collect(),
        config: &report.config,
    };
    write_json(&p("summary.json"), &summary)?;
    write_metrics(&p("metrics.csv"), report)?;
    write_trace(&p("trace.csv"), report)?;
    write_ccdf(&p("ccdf.csv"), report)?;
    write_psd(&p("psd.csv"), report)?;
    write_json(
        &p("timing.json"),
        &Timing {
            wall_time_s: report.wall_time_s,
            drop_elapsed_s: report.drops.iter().map(|d| (d.drop, d.elapsed_s)).collect(),
        },
    )?;
    let manifest = Manifest {
        files: ["summary.json", "metrics.csv", "trace.csv", "ccdf.csv", "psd.csv"]
            .iter()
            .map(|f| hash_entry(out_dir, f))
            .collect::<Result<Vec<_>>>()?,
    };
    write_json(&p("manifest.json"), &manifest)?;
    Ok(manifest)
}

/// Reads back a `metrics.csv` written by [`write_outputs`].
pub fn read_metrics_csv(path: &Path) -> Result<Vec<MetricRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .map(|row| row.map_err(csv_err(path)))
        .collect()
}
