//! Declarative Monte Carlo experiments with deterministic CSV reports.
//!
//! A run is a pure function of its config: every random stream is derived
//! from `(master_seed, kind, stream id, role)`, replicates are collected in
//! index order, and rows are written in grid order, so the output bytes do
//! not depend on the thread count.

mod config;
mod experiments;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::derive_seed;

pub use config::{k_of_gamma, valid_kinds, ExperimentConfig, ExperimentKind, Grid};

/// Output tables of each kind: file stem and columns.
pub fn tables(kind: ExperimentKind) -> &'static [(&'static str, &'static [&'static str])] {
    experiments::tables(kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamRole {
    Evaluation,
    Calibration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamRecord {
    pub stream: u64,
    pub role: StreamRole,
    pub label: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRecord {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub reps: usize,
    pub seed: u64,
    pub q_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub rows: usize,
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub kind: ExperimentKind,
    pub status: &'static str,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub master_seed: u64,
    pub outputs: Vec<OutputFile>,
    pub calibration: Vec<CalibrationRecord>,
    pub streams: Vec<StreamRecord>,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub manifest: Manifest,
}

/// Git-style object hash: SHA-256 of `"blob <len>\0" + bytes`, hex encoded.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) struct Table {
    stem: &'static str,
    path: PathBuf,
    writer: csv::Writer<File>,
    rows: usize,
}

impl Table {
    fn create(dir: &Path, stem: &'static str, header: &[&str]) -> Result<Self> {
        let path = dir.join(format!("{stem}.csv"));
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(&path)?;
        writer.write_record(header)?;
        writer.flush()?;
        Ok(Self { stem, path, writer, rows: 0 })
    }

    /// Writes and flushes one row, so an interrupted run keeps what it has.
    pub(crate) fn row(&mut self, values: Vec<String>) -> Result<()> {
        self.writer.write_record(&values)?;
        self.writer.flush()?;
        self.rows += 1;
        Ok(())
    }
}

pub(crate) fn num(x: f64) -> String {
    format!("{x}")
}

pub(crate) struct Run<'a> {
    pub config: &'a ExperimentConfig,
    tables: Vec<Table>,
    streams: Vec<StreamRecord>,
    pub calibration: Vec<CalibrationRecord>,
}

impl<'a> Run<'a> {
    /// A fresh, logged stream; ids are never reused within a run.
    pub(crate) fn seed(&mut self, role: StreamRole, label: String) -> u64 {
        let stream = self.streams.len() as u64;
        let role_id = role as u64;
        let seed = derive_seed(self.config.master_seed, &[self.config.kind.seed_id(), stream, role_id]);
        self.streams.push(StreamRecord { stream, role, label, seed });
        seed
    }

    pub(crate) fn table(&mut self, stem: &str) -> &mut Table {
        self.tables.iter_mut().find(|t| t.stem == stem).expect("tables are created up front")
    }
}

fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    let mut f = File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// Runs an experiment, writing `<out_dir>/<table>.csv` files and
/// `<out_dir>/manifest.json`.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let out_dir = config.out_dir.clone();
    std::fs::create_dir_all(&out_dir)?;
    let config_hash = content_hash(serde_json::to_string(config)?.as_bytes());
    let mut manifest = Manifest {
        kind: config.kind,
        status: "running",
        config: config.clone(),
        config_hash,
        master_seed: config.master_seed,
        outputs: Vec::new(),
        calibration: Vec::new(),
        streams: Vec::new(),
    };
    let manifest_path = out_dir.join("manifest.json");
    write_manifest(&manifest_path, &manifest)?;

    let mut tables = Vec::new();
    for (stem, header) in experiments::tables(config.kind) {
        tables.push(Table::create(&out_dir, stem, header)?);
    }
    let mut run = Run { config, tables, streams: Vec::new(), calibration: Vec::new() };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::config(format!("field `threads`: {e}")))?;
    pool.install(|| experiments::execute(&mut run))?;

    let mut files = Vec::new();
    for table in run.tables {
        drop(table.writer);
        let bytes = std::fs::read(&table.path)?;
        manifest.outputs.push(OutputFile {
            file: format!("{}.csv", table.stem),
            rows: table.rows,
            hash: content_hash(&bytes),
        });
        files.push(table.path);
    }
    manifest.status = "complete";
    manifest.calibration = run.calibration;
    manifest.streams = run.streams;
    write_manifest(&manifest_path, &manifest)?;
    files.push(manifest_path);
    Ok(Report { out_dir, files, manifest })
}

/// Config schema and output columns of one experiment kind.
pub fn describe(kind: &str) -> Result<String> {
    let kind = ExperimentKind::parse(kind)
        .map_err(|_| Error::config(format!("unknown experiment kind \"{kind}\"; valid kinds: {}", valid_kinds())))?;
    let mut s = String::new();
    s.push_str(&format!("kind: {kind}\n  {}\n\n", experiments::summary(kind)));
    s.push_str("config (JSON object):\n");
    s.push_str(&format!("  kind              \"{kind}\"\n"));
    s.push_str("  spec              weight law, default {\"kind\": \"two-point\", \"a\": 1, \"b\": 2, \"p\": 0.5};\n");
    s.push_str("                    also {\"kind\": \"uniform\", \"a\", \"b\"} and {\"kind\": \"exponential\", \"rate\"}\n");
    s.push_str("  grid              object with the keys below\n");
    s.push_str("  reps              replicates per grid point (>= 2, default 1000)\n");
    s.push_str("  master_seed       u64 (default 0)\n");
    s.push_str("  threads           worker threads, 0 = all cores (default 0)\n");
    s.push_str("  out_dir           output directory (default \"fpplab-out\")\n");
    if matches!(kind, ExperimentKind::NoiseSweep | ExperimentKind::InfluenceProfile | ExperimentKind::SmallballTail) {
        s.push_str("  calibration_reps  replicates for each quantile calibration (default 10000)\n");
    }
    s.push_str("\ngrid keys:\n");
    for key in kind.grid_keys() {
        let text = match *key {
            "n" => "widths n (default 16, 32, 64, 128)",
            "k" => "displacement bounds k (default 1 plus the gamma values)",
            "gamma" => "k = ceil(n^gamma) (default 0.25, 0.5, 0.75)",
            "alpha" => "quantile levels (default 0.25, 0.5, 0.75)",
            "eps" => "resampling probabilities (default 0.02, 0.05, 0.1, 0.2, 0.5, 1)",
            "r" => "shift amplitudes, |r| <= 2 (default -1, -0.5, 0, 0.5, 1)",
            "h" => "direction slopes in [0, 1] (default 0, 0.25, 0.5, 0.75, 1)",
            _ => unreachable!(),
        };
        s.push_str(&format!("  {key:<6} {text}\n"));
    }
    s.push_str("\noutputs:\n");
    for (stem, columns) in experiments::tables(kind) {
        s.push_str(&format!("  {stem}.csv\n    {}\n", columns.join(",")));
    }
    s.push_str("  manifest.json\n    config echo, config hash, output hashes, calibrations, stream ids\n");
    Ok(s)
}
