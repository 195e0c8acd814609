//! Experiment configuration, dispatch, persistence, and parameter sweeps.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rng;

pub mod cli;
mod commands;
mod params;

pub use commands::{ball_theorem_exact, MAX_SAMPLE_BUDGET};

/// Environment variable holding the default sweep concurrency.
pub const JOBS_ENV: &str = "CONVEXITY_TESTBED_JOBS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    TestOneSided,
    TestTwoSided,
    GenDyes,
    GenDno,
    Distinguish,
    Shatter,
    Typicality,
    BoundaryVolume,
    BallTheorem,
    AppendixLemmas,
    Cover,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::TestOneSided => "test-one-sided",
            Command::TestTwoSided => "test-two-sided",
            Command::GenDyes => "gen-dyes",
            Command::GenDno => "gen-dno",
            Command::Distinguish => "distinguish",
            Command::Shatter => "shatter",
            Command::Typicality => "typicality",
            Command::BoundaryVolume => "boundary-volume",
            Command::BallTheorem => "ball-theorem",
            Command::AppendixLemmas => "appendix-lemmas",
            Command::Cover => "cover",
        }
    }

    /// Parameter names the command accepts.
    pub fn keys(self) -> &'static [&'static str] {
        commands::keys(self)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(command: Command, seed: u64) -> Self {
        Self {
            command,
            params: BTreeMap::new(),
            seed,
            output_path: None,
            format: Format::Json,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

/// Where a derived parameter's value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Default,
    Override,
    Clamped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedParam {
    pub value: Value,
    pub source: Source,
}

/// Per-trial rows for the CSV log.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell))?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Debug, Default)]
pub(crate) struct Outcome {
    derived: BTreeMap<String, DerivedParam>,
    metrics: Value,
    table: Option<Table>,
}

impl Outcome {
    fn new(metrics: Value) -> Self {
        Self {
            metrics,
            ..Self::default()
        }
    }

    fn derive(&mut self, key: &str, value: impl Serialize, source: Source) {
        let value = serde_json::to_value(value).expect("derived values serialize");
        self.derived.insert(key.to_string(), DerivedParam { value, source });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub derived: BTreeMap<String, DerivedParam>,
    pub metrics: Value,
    pub wall_clock_ms: f64,
    pub version: String,
    /// Per-trial rows; written by [`write_trial_log`], not part of the JSON.
    #[serde(skip)]
    pub trial_log: Option<Table>,
}

impl ExperimentReport {
    /// `metrics` as canonical JSON text, for byte comparisons across runs.
    pub fn metrics_json(&self) -> String {
        serde_json::to_string(&self.metrics).expect("metrics serialize")
    }

    /// The trial log, or the scalar metrics as a one-row table.
    pub fn table(&self) -> Table {
        if let Some(t) = &self.trial_log {
            return t.clone();
        }
        let flat = flatten(&self.metrics);
        Table {
            columns: flat.keys().cloned().collect(),
            rows: vec![flat.into_values().collect()],
        }
    }
}

/// Scalar leaves of a JSON value keyed by dotted paths; arrays are skipped.
pub fn flatten(v: &Value) -> BTreeMap<String, Value> {
    fn walk(prefix: &str, v: &Value, out: &mut BTreeMap<String, Value>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, x, out);
                }
            }
            Value::Array(_) => {}
            scalar => {
                out.insert(prefix.to_string(), scalar.clone());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk("", v, &mut out);
    out
}

/// Runs one experiment and, when `output_path` is set, writes its report.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let out = commands::dispatch(config)?;
    let report = ExperimentReport {
        config: config.clone(),
        derived: out.derived,
        metrics: out.metrics,
        wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
        version: env!("CARGO_PKG_VERSION").to_string(),
        trial_log: out.table,
    };
    if let Some(path) = &config.output_path {
        write_report(&report, path, config.format)?;
    }
    Ok(report)
}

pub fn render(report: &ExperimentReport, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(report)?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => report.table().to_csv(),
    }
}

pub fn write_report(report: &ExperimentReport, path: &Path, format: Format) -> Result<()> {
    write_atomic(path, &render(report, format)?)
}

pub fn write_trial_log(report: &ExperimentReport, path: &Path) -> Result<()> {
    write_atomic(path, &report.table().to_csv()?)
}

/// Writes to a temporary file beside `path`, then renames it into place, so
/// readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// `CONVEXITY_TESTBED_JOBS` when set and positive, else the core count.
pub fn default_jobs() -> usize {
    std::env::var(JOBS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|j| *j > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub index: usize,
    pub value: Value,
    pub seed: u64,
    pub outcome: std::result::Result<ExperimentReport, String>,
}

/// Runs `base` once per value of `axis`. Cell `i` gets seed
/// `split_seed(base.seed, i)`; a failing cell records its error and the
/// sweep carries on.
pub fn sweep(base: &ExperimentConfig, axis: &str, values: &[Value], jobs: usize) -> Result<Vec<SweepCell>> {
    let mut errors = Vec::new();
    if !base.command.keys().contains(&axis) {
        errors.push(format!("unknown key \"{axis}\" for {}", base.command.name()));
    }
    for v in values {
        if !v.is_number() {
            errors.push(format!("sweep value {v} is not a number"));
        }
    }
    if jobs == 0 {
        errors.push("jobs must be at least 1".into());
    }
    if !errors.is_empty() {
        return Err(Error::Validation(errors));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::param(e.to_string()))?;
    let cells = pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(index, value)| {
                let seed = rng::split_seed(base.seed, index as u64);
                let mut cfg = base.clone().with(axis, value.clone());
                cfg.seed = seed;
                cfg.output_path = None;
                SweepCell {
                    index,
                    value: value.clone(),
                    seed,
                    outcome: run(&cfg).map_err(|e| e.to_string()),
                }
            })
            .collect()
    });
    Ok(cells)
}

/// One row per cell: axis value, seed, error, and every scalar metric.
pub fn sweep_table(axis: &str, cells: &[SweepCell]) -> Table {
    let flat: Vec<BTreeMap<String, Value>> = cells
        .iter()
        .map(|c| c.outcome.as_ref().map(|r| flatten(&r.metrics)).unwrap_or_default())
        .collect();
    let mut metric_keys: Vec<String> = flat.iter().flat_map(|m| m.keys().cloned()).collect();
    metric_keys.sort();
    metric_keys.dedup();
    let mut columns = vec!["cell".to_string(), axis.to_string(), "seed".into(), "error".into()];
    metric_keys.retain(|k| !columns.contains(k));
    columns.extend(metric_keys.iter().cloned());
    let rows = cells
        .iter()
        .zip(&flat)
        .map(|(c, m)| {
            let mut row = vec![
                Value::from(c.index),
                c.value.clone(),
                Value::from(c.seed),
                c.outcome.as_ref().err().map_or(Value::Null, |e| Value::from(e.as_str())),
            ];
            row.extend(metric_keys.iter().map(|k| m.get(k).cloned().unwrap_or(Value::Null)));
            row
        })
        .collect();
    Table { columns, rows }
}

/// Process exit status for an error: 2 for invalid input, 3 for parameters
/// that cannot be materialized, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_)
        | Error::Validation(_)
        | Error::DimensionMismatch { .. }
        | Error::Json(_) => 2,
        Error::Infeasible { .. } | Error::NoSignChange(_) => 3,
        Error::Io(_) | Error::Csv(_) => 1,
    }
}
