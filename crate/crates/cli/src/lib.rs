//! Experiment runner for random-X degrees of freedom.
//!
//! Configs are TOML files (see [`config`]); every run writes CSV tables with a
//! JSON manifest next to each one. Output depends only on the resolved config,
//! never on the worker count.

pub mod config;
pub mod recipes;
pub mod runs;
pub mod table;
pub mod theory;

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use config::{ExperimentConfig, Kind};
use table::Table;

pub const WORKERS_ENV: &str = "RXDF_MAX_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("run failed: {0}")]
    Failure(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    pub fn config(e: rxdf_core::Error) -> Self {
        RunError::Config(e.to_string())
    }

    pub fn failure(e: rxdf_core::Error) -> Self {
        RunError::Failure(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Failure(_) | RunError::Io(_) => 3,
        }
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self, RunError> {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(r) = o.reps {
            self.estimator.n_reps = r;
        }
        if let Some(p) = &o.out {
            self.out = Some(p.clone());
        }
        self.validate()?;
        Ok(self)
    }

    /// Hex SHA-256 of the resolved config, output location excluded.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        format!("{:x}", Sha256::digest(bytes))
    }

    pub fn figure(&self) -> Option<&str> {
        self.reproduce.as_ref().map(|r| r.figure.as_str())
    }

    pub fn default_out(&self) -> PathBuf {
        match self.figure() {
            Some(f) => PathBuf::from(format!("rxdf-{f}")),
            None => PathBuf::from(format!("rxdf-{}.csv", self.kind.name())),
        }
    }
}

/// Config for `reproduce <figure>` without a file.
pub fn reproduce_config(figure: &str) -> Result<ExperimentConfig, RunError> {
    ExperimentConfig::parse(&format!("kind = \"reproduce\"\n[reproduce]\nfigure = {figure:?}\n"))
}

/// Runs a validated config and returns named tables.
pub fn compute(cfg: &ExperimentConfig) -> Result<Vec<(String, Table)>, RunError> {
    let est = cfg.estimator_config();
    let single = |t: Table| {
        let name = cfg
            .out
            .as_ref()
            .and_then(|p| p.file_name())
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("rxdf-{}.csv", cfg.kind.name()));
        Ok(vec![(name, t)])
    };
    match cfg.kind {
        Kind::Sweep => {
            let s = cfg.sweep.as_ref().expect("validated");
            let pts = runs::points(cfg)?;
            single(runs::run_sweep(s.parameter.column(), &pts, &est, s.theory)?)
        }
        Kind::Decompose => {
            let s = cfg.decompose.as_ref().expect("validated");
            let pts = runs::points(cfg)?;
            single(runs::run_decompose(s.parameter.column(), &pts, &s.shift, &est)?)
        }
        Kind::Asymptotics => single(theory::run_asymptotics(cfg)?),
        Kind::Reproduce => recipes::find(cfg.figure().expect("validated"))?.run(&est),
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub kind: &'static str,
    pub figure: Option<&'a str>,
    pub file: &'a str,
    pub config_sha256: String,
    pub seed: u64,
    pub n_reps: usize,
    pub rows: usize,
    pub columns: &'a [String],
}

pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("manifest.json")
}

pub fn manifest_json(cfg: &ExperimentConfig, file: &str, table: &Table) -> String {
    let m = Manifest {
        tool: "rxdf",
        version: env!("CARGO_PKG_VERSION"),
        kind: cfg.kind.name(),
        figure: cfg.figure(),
        file,
        config_sha256: cfg.digest(),
        seed: cfg.seed,
        n_reps: cfg.estimator.n_reps,
        rows: table.rows.len(),
        columns: &table.header,
    };
    let mut s = serde_json::to_string_pretty(&m).expect("manifest serializes");
    s.push('\n');
    s
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    std::fs::write(path, bytes).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

/// Runs a config and writes every table with its manifest; returns the CSV
/// paths. Reproduce runs write into a directory, the others to one file.
pub fn execute(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, RunError> {
    let tables = compute(cfg)?;
    let out = cfg.out.clone().unwrap_or_else(|| cfg.default_out());
    let dir = if cfg.kind == Kind::Reproduce {
        out.clone()
    } else {
        out.parent().map(Path::to_path_buf).unwrap_or_default()
    };
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(&dir).map_err(|e| RunError::Io(format!("{}: {e}", dir.display())))?;
    }
    let mut written = Vec::new();
    for (name, table) in &tables {
        let path = if cfg.kind == Kind::Reproduce { dir.join(name) } else { out.clone() };
        write(&path, &table.to_csv()?)?;
        write(&manifest_path(&path), manifest_json(cfg, name, table).as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

/// Worker count from the flag, capped by the environment variable.
pub fn worker_count(flag: Option<usize>, env: Option<&str>) -> Option<usize> {
    let cap = env.and_then(|v| v.trim().parse::<usize>().ok()).filter(|c| *c > 0);
    match (flag, cap) {
        (Some(f), Some(c)) => Some(f.min(c).max(1)),
        (Some(f), None) => Some(f.max(1)),
        (None, c) => c,
    }
}

pub fn configure_workers(flag: Option<usize>) {
    let env = std::env::var(WORKERS_ENV).ok();
    if let Some(n) = worker_count(flag, env.as_deref()) {
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}
