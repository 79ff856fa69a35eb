//! CSV rows, the single-writer result sink and the run manifest.

use crate::{config::ExperimentConfig, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

/// One CSV row. Theory columns come from the mean-field iteration, sim
/// columns from the spiking chain; either side may be empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub experiment: String,
    pub r: f64,
    #[serde(rename = "W")]
    pub w: usize,
    pub lambda: f64,
    pub seed: Option<u64>,
    pub layer: usize,
    pub rho_in_theory: Option<f64>,
    pub rho_out_theory: Option<f64>,
    pub rho_in_sim: Option<f64>,
    pub rho_out_sim: Option<f64>,
    /// Simulated background rate when the row has a simulation, else the
    /// theory value.
    pub mu_out_hz: Option<f64>,
    pub cv_mean: Option<f64>,
    pub label: String,
    pub wall_ms: f64,
}

pub const COLUMNS: [&str; 14] = [
    "experiment",
    "r",
    "W",
    "lambda",
    "seed",
    "layer",
    "rho_in_theory",
    "rho_out_theory",
    "rho_in_sim",
    "rho_out_sim",
    "mu_out_hz",
    "cv_mean",
    "label",
    "wall_ms",
];

/// Identifies a sweep point for resuming.
pub type PointKey = (String, u64, usize, u64, Option<u64>);

pub fn point_key(experiment: &str, r: f64, w: usize, lambda: f64, seed: Option<u64>) -> PointKey {
    (experiment.to_string(), r.to_bits(), w, lambda.to_bits(), seed)
}

impl Record {
    pub fn key(&self) -> PointKey {
        point_key(&self.experiment, self.r, self.w, self.lambda, self.seed)
    }
}

/// Appends finished points to `<dir>/<name>.csv`. Rows of one point are
/// written and flushed together, so an interrupted run leaves only whole
/// points behind. Reopening with the same config hash keeps earlier rows.
pub struct ResultSink {
    path: PathBuf,
    writer: Mutex<csv::Writer<File>>,
    done: HashSet<PointKey>,
    previous: Vec<Record>,
}

impl ResultSink {
    pub fn open(dir: &Path, name: &str, cfg: &ExperimentConfig) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{name}.csv"));
        let marker = dir.join(format!("{name}.hash"));
        let hash = cfg.hash();
        let resumable = path.exists() && std::fs::read_to_string(&marker).map(|h| h.trim() == hash).unwrap_or(false);
        let mut previous = Vec::new();
        if resumable {
            let mut rd = csv::Reader::from_path(&path)?;
            for row in rd.deserialize() {
                previous.push(row?);
            }
        }
        let file = if resumable {
            OpenOptions::new().append(true).open(&path)?
        } else {
            let mut f = File::create(&path)?;
            writeln!(f, "{}", COLUMNS.join(","))?;
            std::fs::write(&marker, &hash)?;
            f
        };
        let writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        let done = previous.iter().map(Record::key).collect();
        Ok(Self { path, writer: Mutex::new(writer), done, previous })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn is_done(&self, key: &PointKey) -> bool {
        self.done.contains(key)
    }

    /// Rows recovered from an earlier run with the same config.
    pub fn previous(&self, key: &PointKey) -> Vec<Record> {
        self.previous.iter().filter(|r| &r.key() == key).cloned().collect()
    }

    pub fn write_point(&self, rows: &[Record]) -> Result<()> {
        let mut w = self.writer.lock().expect("writer lock");
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `manifest.txt`: config hash, crate version, the resolved config and
/// any free-form notes (such as deviations from reference values).
pub fn write_manifest(dir: &Path, experiment: &str, cfg: &ExperimentConfig, notes: &[String]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("manifest.txt");
    let mut f = OpenOptions::new().create(true).append(true).open(&path)?;
    writeln!(f, "# run: {experiment}")?;
    writeln!(f, "config_hash = {}", cfg.hash())?;
    writeln!(f, "harness_version = {}", env!("CARGO_PKG_VERSION"))?;
    for n in notes {
        writeln!(f, "note = {n}")?;
    }
    writeln!(f, "--- config ---")?;
    write!(f, "{}", cfg.to_toml())?;
    writeln!(f, "--- end ---")?;
    Ok(path)
}
