//! Parameter sweeps: one run per value, in parallel, plus a summary table.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::Result;
use rayon::prelude::*;

use crate::config::{ConfigError, ScenarioConfig};
use crate::output::{resolve_output_dir, write_atomic, RunManifest, Table};
use crate::scenarios::run_at;

/// Optional fields that are absent from a defaulted config but may still be swept.
const OPTIONAL_AXES: [&str; 2] = ["euler1d.dt", "euler1d.velocity_alpha_power"];

#[derive(Debug)]
pub struct SweepRun {
    pub value: String,
    /// Manifest, or the error that stopped this run.
    pub result: std::result::Result<RunManifest, String>,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub runs: Vec<SweepRun>,
    pub dir: PathBuf,
    pub summary: PathBuf,
}

impl SweepOutcome {
    pub fn all_passed(&self) -> bool {
        self.runs
            .iter()
            .all(|r| r.result.as_ref().is_ok_and(|m| m.passed()))
    }
}

fn check_axis(base: &ScenarioConfig, axis: &str) -> std::result::Result<(), ConfigError> {
    if OPTIONAL_AXES.contains(&axis) {
        return Ok(());
    }
    let tree = toml::Value::try_from(base.clone().normalized())
        .map_err(|e| ConfigError::new(axis, e.to_string()))?;
    let mut node = &tree;
    for part in axis.split('.') {
        node = node
            .get(part)
            .ok_or_else(|| ConfigError::new(axis, "no such field in the config"))?;
    }
    if node.is_table() {
        return Err(ConfigError::new(axis, "names a table, not a field"));
    }
    Ok(())
}

fn dir_name(axis: &str, value: &str) -> String {
    let leaf = axis.rsplit('.').next().unwrap_or(axis);
    let v: String = value
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.+".contains(c) { c } else { '_' })
        .collect();
    format!("{leaf}-{v}")
}

/// Runs `base` once per value of `axis`. A failing run is reported in its summary row and does
/// not stop the others. Without an explicit `output_dir` the sweep gets its own directory,
/// apart from where a plain run of `base` would go.
pub fn sweep(base: &ScenarioConfig, axis: &str, values: &[String], root: &Path) -> Result<SweepOutcome> {
    base.validate()?;
    check_axis(base, axis)?;
    let dir = match &base.output_dir {
        Some(_) => resolve_output_dir(base, root),
        None => {
            let leaf = axis.rsplit('.').next().unwrap_or(axis);
            root.join(format!("{}-sweep-{leaf}-{}", base.kind.name(), &base.hash()[..12]))
        }
    };
    let runs: Vec<SweepRun> = values
        .par_iter()
        .map(|v| {
            let result = base
                .with_field(axis, v)
                .map_err(anyhow::Error::from)
                .and_then(|cfg| run_at(&cfg, &dir.join(dir_name(axis, v))))
                .map_err(|e| format!("{e:#}"));
            SweepRun {
                value: v.clone(),
                result,
            }
        })
        .collect();

    let metrics: BTreeSet<String> = runs
        .iter()
        .filter_map(|r| r.result.as_ref().ok())
        .flat_map(|m| m.metrics.keys().cloned())
        .collect();
    let mut header: Vec<String> = ["value", "status", "verdict", "config_hash"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(metrics.iter().cloned());
    header.push("error".into());
    let mut table = Table::new(header);
    for r in &runs {
        let mut row = vec![r.value.clone()];
        match &r.result {
            Ok(m) => {
                row.extend(["ok".into(), m.verdict.to_string(), m.config_hash.clone()]);
                row.extend(metrics.iter().map(|k| {
                    m.metrics
                        .get(k)
                        .map(|v| crate::output::fmt_f64(*v))
                        .unwrap_or_default()
                }));
                row.push(String::new());
            }
            Err(e) => {
                row.extend(["error".into(), String::new(), String::new()]);
                row.extend(metrics.iter().map(|_| String::new()));
                row.push(e.clone());
            }
        }
        table.push(row);
    }
    let summary = dir.join("summary.csv");
    write_atomic(&summary, &table.to_bytes()?)?;
    Ok(SweepOutcome { runs, dir, summary })
}
