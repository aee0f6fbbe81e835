//! Output directories, manifests and CSV emission.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use vacuumlab::Verdict;

use crate::config::ScenarioConfig;

/// Overrides the default output root `./vacuumlab-out`.
pub const OUTPUT_ROOT_ENV: &str = "VACUUMLAB_OUTPUT_ROOT";

pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("vacuumlab-out"))
}

/// Where a run of `cfg` writes: its `output_dir` (relative ones under `root`), or
/// `<root>/<kind>-<hash prefix>`.
pub fn resolve_output_dir(cfg: &ScenarioConfig, root: &Path) -> PathBuf {
    match &cfg.output_dir {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => root.join(p),
        None => root.join(format!("{}-{}", cfg.kind.name(), &cfg.hash()[..12])),
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

/// In-memory CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Scenario kind, or `accept` for the acceptance suite.
    pub kind: String,
    pub config_hash: String,
    pub code_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub started_unix_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finished_unix_s: Option<f64>,
    pub verdict: Verdict,
    pub verdicts: BTreeMap<String, Verdict>,
    pub metrics: BTreeMap<String, f64>,
    /// Files of the run directory relative to it, sorted; excludes the manifest itself.
    pub outputs: Vec<String>,
    #[serde(skip)]
    pub output_dir: PathBuf,
}

impl RunManifest {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        Self::with(cfg.kind.name(), cfg.hash(), cfg.deterministic)
    }

    pub fn with(kind: &str, config_hash: String, deterministic: bool) -> Self {
        Self {
            kind: kind.to_string(),
            config_hash,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix_s: (!deterministic).then(now),
            finished_unix_s: None,
            verdict: Verdict::Pass,
            verdicts: BTreeMap::new(),
            metrics: BTreeMap::new(),
            outputs: Vec::new(),
            output_dir: PathBuf::new(),
        }
    }

    pub fn record(&mut self, name: &str, v: Verdict) {
        self.verdicts.insert(name.to_string(), v);
    }

    pub fn metric(&mut self, name: &str, v: f64) {
        self.metrics.insert(name.to_string(), v);
    }

    /// `FAIL` when any check failed; expected failures count as success.
    pub fn finish(&mut self, deterministic: bool) {
        self.verdict = Verdict::from_bool(self.verdicts.values().all(|v| v.is_success()));
        if !deterministic {
            self.finished_unix_s = Some(now());
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_success()
    }
}

fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

static STAGE_COUNTER: AtomicU64 = AtomicU64::new(0);

/// A run directory under construction. Files go to a hidden sibling; `commit` writes the
/// manifest and renames the whole directory into place. Dropping without a commit removes
/// everything written so far.
#[derive(Debug)]
pub struct Staging {
    dir: PathBuf,
    target: PathBuf,
    files: Vec<String>,
    committed: bool,
}

impl Staging {
    pub fn new(target: &Path) -> Result<Self> {
        let parent = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let name = target
            .file_name()
            .with_context(|| format!("output path {} has no final component", target.display()))?
            .to_string_lossy()
            .into_owned();
        fs::create_dir_all(&parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
        let n = STAGE_COUNTER.fetch_add(1, Ordering::Relaxed);
        let dir = parent.join(format!(".{name}.staging-{}-{n}", std::process::id()));
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        fs::create_dir(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Self {
            dir,
            target: target.to_path_buf(),
            files: Vec::new(),
            committed: false,
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn target(&self) -> &Path {
        &self.target
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let p = self.dir.join(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&p, bytes).with_context(|| format!("cannot write {}", p.display()))?;
        self.files.push(rel.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(rel, s.as_bytes())
    }

    /// Records files placed in the staging directory by other means, e.g. a nested run.
    pub fn adopt(&mut self, rel: &str) {
        self.files.push(rel.to_string());
    }

    pub fn commit(mut self, manifest: &mut RunManifest) -> Result<()> {
        let mut files = self.files.clone();
        files.sort();
        files.dedup();
        manifest.outputs = files;
        manifest.output_dir = self.target.clone();
        let mut s = serde_json::to_string_pretty(manifest)?;
        s.push('\n');
        fs::write(self.dir.join("manifest.json"), s)?;
        if self.target.exists() {
            fs::remove_dir_all(&self.target)
                .with_context(|| format!("cannot replace {}", self.target.display()))?;
        }
        fs::rename(&self.dir, &self.target).with_context(|| {
            format!(
                "cannot move {} to {}",
                self.dir.display(),
                self.target.display()
            )
        })?;
        self.committed = true;
        Ok(())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.dir);
        }
    }
}

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(parent)?;
    let name = path
        .file_name()
        .context("path has no file name")?
        .to_string_lossy();
    let tmp = parent.join(format!(".{name}.tmp-{}", std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        e.into()
    })
}

/// Relative paths of all files below `root`, sorted.
pub fn list_tree(root: &Path) -> Result<Vec<PathBuf>> {
    fn walk(base: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
        for entry in fs::read_dir(dir)? {
            let entry = entry?;
            let p = entry.path();
            if entry.file_type()?.is_dir() {
                walk(base, &p, out)?;
            } else {
                out.push(p.strip_prefix(base)?.to_path_buf());
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    walk(root, root, &mut out)?;
    out.sort();
    Ok(out)
}

/// First difference between two directory trees, or `None` when they are byte-identical.
pub fn diff_trees(a: &Path, b: &Path) -> Result<Option<String>> {
    let la = list_tree(a)?;
    let lb = list_tree(b)?;
    if la != lb {
        let only_a: Vec<_> = la.iter().filter(|p| !lb.contains(p)).collect();
        let only_b: Vec<_> = lb.iter().filter(|p| !la.contains(p)).collect();
        return Ok(Some(format!(
            "file lists differ: only in first {only_a:?}, only in second {only_b:?}"
        )));
    }
    for rel in &la {
        if fs::read(a.join(rel))? != fs::read(b.join(rel))? {
            return Ok(Some(format!("{} differs", rel.display())));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02e23, -0.0, 5e-324, 2.0f64.sqrt()] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(0.5), "0.5");
    }

    #[test]
    fn dropped_staging_leaves_nothing() {
        let root = tempfile::tempdir().unwrap();
        let target = root.path().join("run");
        {
            let mut s = Staging::new(&target).unwrap();
            s.write("a.csv", b"t\n1\n").unwrap();
        }
        assert!(!target.exists());
        assert_eq!(fs::read_dir(root.path()).unwrap().count(), 0);
    }
}
