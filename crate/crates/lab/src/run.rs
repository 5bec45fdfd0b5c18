//! Running a validated configuration and writing its outputs.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;
use crate::error::LabError;
use crate::registry::RunContext;
use crate::table::Table;

/// In-memory result of one run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub kind: String,
    pub tables: Vec<Table>,
    pub warnings: Vec<String>,
    pub duration: Duration,
}

impl RunResult {
    /// The table written to `name` (e.g. `braess_pairs.csv`).
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.file_name(&self.kind) == name)
    }

    pub fn primary(&self) -> &Table {
        self.tables
            .iter()
            .find(|t| t.suffix.is_none())
            .expect("every run has a primary table")
    }
}

/// Runs `cfg`, on a dedicated pool of `threads` workers when given.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<RunResult, LabError> {
    let ctx = RunContext {
        master_seed: cfg.master_seed,
        constants: cfg.constants.clone(),
    };
    let start = Instant::now();
    let out = match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| LabError::Io(std::io::Error::other(e)))?;
            pool.install(|| cfg.plan.run(&ctx))?
        }
        None => cfg.plan.run(&ctx)?,
    };
    let mut warnings = cfg.warnings.clone();
    warnings.extend(out.warnings);
    Ok(RunResult {
        kind: cfg.kind.clone(),
        tables: out.tables,
        warnings,
        duration: start.elapsed(),
    })
}

pub fn manifest(cfg: &ExperimentConfig, result: &RunResult) -> Value {
    let rows: Map<String, Value> = result
        .tables
        .iter()
        .map(|t| (t.file_name(&result.kind), Value::from(t.rows.len())))
        .collect();
    let warnings: Vec<Value> = result
        .warnings
        .iter()
        .map(|w| json!({ "warning": w }))
        .collect();
    json!({
        "artifact": env!("CARGO_PKG_NAME"),
        "artifact_version": env!("CARGO_PKG_VERSION"),
        "kind": result.kind,
        "config": cfg.echo,
        "master_seed": cfg.master_seed,
        "seed_source": cfg.seed_source.as_str(),
        "rows": rows,
        "warnings": warnings,
        "duration_seconds": result.duration.as_secs_f64(),
    })
}

/// Writes every table and `manifest.json` into `dir`, returning the paths.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    result: &RunResult,
    dir: &Path,
) -> Result<Vec<PathBuf>, LabError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for t in &result.tables {
        let path = dir.join(t.file_name(&result.kind));
        std::fs::write(&path, t.to_csv_bytes()?)?;
        written.push(path);
    }
    let path = dir.join("manifest.json");
    let mut text =
        serde_json::to_string_pretty(&manifest(cfg, result)).map_err(std::io::Error::from)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    written.push(path);
    Ok(written)
}
