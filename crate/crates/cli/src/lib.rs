//! Batch driver: configuration, verification suites and artifact emission.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod series;
pub mod suites;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

use config::RunConfig;
use report::{Metadata, Report};
use suites::{run_suite, Ctx};

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Runs the configured suites and writes `report.json`, `metadata.json` and the CSV series.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    let out = cfg.output_dir.as_path();
    let ctx = Ctx::new(cfg, out)?;
    let started = unix_now();
    let mut elapsed = BTreeMap::new();
    let mut suites = Vec::new();
    for s in cfg.suite.expand() {
        let clock = Instant::now();
        suites.push(run_suite(s, &ctx));
        elapsed.insert(s.name(), clock.elapsed().as_secs_f64());
    }
    // the worker count does not affect results and is recorded in metadata.json
    let mut echo = cfg.clone();
    echo.workers = None;
    let report = Report::new(echo, suites);
    write_json(&out.join("report.json"), &report)?;
    let meta = Metadata {
        version: env!("CARGO_PKG_VERSION").into(),
        started_unix: started,
        finished_unix: unix_now(),
        workers: rayon::current_num_threads(),
        elapsed_seconds: elapsed,
    };
    write_json(&out.join("metadata.json"), &meta)?;
    Ok(report)
}

/// Creates the output directory and checks that it is writable.
pub fn prepare_output(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").with_context(|| format!("{} is not writable", dir.display()))?;
    fs::remove_file(&probe)?;
    Ok(())
}
