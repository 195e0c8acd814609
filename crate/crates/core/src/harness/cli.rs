//! Command-line front end. `main` only forwards to [`main`] here.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use super::{
    default_jobs, exit_code, render, run, sweep, sweep_table, write_atomic, write_trial_log, Command,
    ExperimentConfig, Format,
};
use crate::error::{Error, Result};

/// A JSON value given inline or as a path to a JSON file.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct JsonArg(pub Value);

impl FromStr for JsonArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Ok(v) = serde_json::from_str(s) {
            return Ok(JsonArg(v));
        }
        let text = std::fs::read_to_string(s).map_err(|e| format!("neither JSON nor a readable file: {e}"))?;
        serde_json::from_str(&text)
            .map(JsonArg)
            .map_err(|e| format!("{s}: {e}"))
    }
}

/// `KEY=VALUE`; the value is read as JSON when it parses, else as a string.
fn parse_set(s: &str) -> std::result::Result<(String, Value), String> {
    let (k, v) = s.split_once('=').ok_or("expected KEY=VALUE")?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.to_string(), value))
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write per-trial rows as CSV.
    #[arg(long)]
    trial_log: Option<PathBuf>,
    /// Extra parameter, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_set)]
    set: Vec<(String, Value)>,
}

macro_rules! flags {
    ($name:ident { $($field:ident : $ty:ty),* $(,)? }) => {
        #[derive(Debug, Args)]
        struct $name {
            $(#[arg(long)] $field: Option<$ty>,)*
            #[command(flatten)]
            common: Common,
        }

        impl $name {
            fn params(&self) -> Vec<(&'static str, Value)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        out.push((stringify!($field), serde_json::to_value(v).expect("flag values serialize")));
                    }
                )*
                out
            }
        }
    };
}

flags!(OneSidedArgs {
    target: JsonArg,
    n: u64,
    eps: f64,
    ell: f64,
    nprime: f64,
    cube_cap: u64,
    samples: u64,
    runs: u64,
    guarded: bool,
});

flags!(TwoSidedArgs {
    target: JsonArg,
    n: u64,
    eps: f64,
    delta: f64,
    ell: f64,
    nprime: f64,
    cube_cap: u64,
    cover_cap: u64,
    cover_mode: JsonArg,
    learn_samples: u64,
    estimate_samples: u64,
    two_stage: bool,
    test_constant: f64,
});

flags!(DyesArgs { n: u64, halfspaces: u64, r: f64 });

flags!(DnoArgs {
    n: u64,
    shells: u64,
    halfspaces: u64,
    r: f64,
});

flags!(DistinguishArgs {
    n: u64,
    q: u64,
    halfspaces: u64,
    r: f64,
    trials: u64,
    points: JsonArg,
    typical_attempts: u64,
    mc_budget: u64,
    bootstrap: u64,
});

flags!(ShatterArgs { n: u64, m: u64, trials: u64 });

flags!(TypicalityArgs {
    n: u64,
    q: u64,
    points: JsonArg,
    halfspaces: u64,
    r: f64,
    mc_budget: u64,
});

flags!(BoundaryVolumeArgs {
    n: u64,
    k: f64,
    alpha: f64,
    polytopes: u64,
    samples: u64,
});

flags!(BallTheoremArgs { target: JsonArg, h: f64, samples: u64 });

flags!(LemmaArgs {
    lemma: String,
    n: u64,
    rho: f64,
    beta: f64,
    alpha: f64,
    width: f64,
    half_extent: f64,
    samples: u64,
    family: JsonArg,
    points: u64,
});

flags!(CoverArgs {
    n: u64,
    eps: f64,
    ell: f64,
    nprime: f64,
    cube_cap: u64,
    cover_cap: u64,
    mode: JsonArg,
});

#[derive(Debug, Args)]
struct SweepArgs {
    /// Base configuration file (an experiment config in JSON).
    #[arg(long, conflicts_with = "command")]
    base: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "base")]
    command: Option<Command>,
    /// Parameter to vary.
    #[arg(long)]
    axis: String,
    /// Comma-separated numbers.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_set)]
    set: Vec<(String, Value)>,
    /// Concurrent cells; defaults to $CONVEXITY_TESTBED_JOBS or the core count.
    #[arg(long)]
    jobs: Option<usize>,
    /// Combined CSV path; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write every cell's full report as a JSON array.
    #[arg(long)]
    reports: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Run the one-sided tester A' on a target.
    TestOneSided(OneSidedArgs),
    /// Learn a cover element, then test it against fresh samples.
    TestTwoSided(TwoSidedArgs),
    /// Draw a random polytope.
    GenDyes(DyesArgs),
    /// Draw a random union of equal-mass shells.
    GenDno(DnoArgs),
    /// Compare polytope labels with the independent product law.
    Distinguish(DistinguishArgs),
    /// How often Gaussian points are in convex position.
    Shatter(ShatterArgs),
    /// Check the cap windows of a query set.
    Typicality(TypicalityArgs),
    /// Thickened-boundary volume of random polytopes against its bound.
    BoundaryVolume(BoundaryVolumeArgs),
    /// Gaussian surface-area bound for a convex target.
    BallTheorem(BallTheoremArgs),
    /// One of the geometric lemma checks (no_ball, shrink, thicken).
    AppendixLemmas(LemmaArgs),
    /// Enumerate the cube-hull cover.
    Cover(CoverArgs),
    /// Vary one numeric parameter across cells.
    Sweep(SweepArgs),
}

#[derive(Debug, Parser)]
#[command(name = "convexity-testbed", version, about = "Convexity testing under the Gaussian measure")]
struct Cli {
    #[command(subcommand)]
    sub: Sub,
}

fn config_of(command: Command, flags: Vec<(&'static str, Value)>, common: &Common) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(command, common.seed);
    for (k, v) in flags {
        cfg.params.insert(k.to_string(), v);
    }
    for (k, v) in &common.set {
        cfg.params.insert(k.clone(), v.clone());
    }
    cfg.output_path = common.output.clone();
    cfg.format = common.format;
    cfg
}

fn run_one(cfg: ExperimentConfig, trial_log: Option<&Path>) -> Result<()> {
    let report = run(&cfg)?;
    if let Some(p) = trial_log {
        write_trial_log(&report, p)?;
    }
    if cfg.output_path.is_none() {
        print!("{}", String::from_utf8_lossy(&render(&report, cfg.format)?));
    }
    Ok(())
}

fn run_sweep(a: SweepArgs) -> Result<()> {
    let mut base = match (&a.base, a.command) {
        (Some(path), _) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        (None, Some(c)) => ExperimentConfig::new(c, a.seed),
        (None, None) => return Err(Error::Validation(vec!["sweep needs --command or --base".into()])),
    };
    if a.base.is_none() {
        base.seed = a.seed;
    }
    for (k, v) in a.set {
        base.params.insert(k, v);
    }
    let values: Vec<Value> = a.values.iter().map(|v| number(*v)).collect();
    let jobs = a.jobs.unwrap_or_else(default_jobs);
    let cells = sweep(&base, &a.axis, &values, jobs)?;
    for c in &cells {
        if let Err(e) = &c.outcome {
            eprintln!("cell {} ({} = {}): {e}", c.index, a.axis, c.value);
        }
    }
    let csv = sweep_table(&a.axis, &cells).to_csv()?;
    if let Some(path) = &a.reports {
        let reports: Vec<Value> = cells
            .iter()
            .map(|c| match &c.outcome {
                Ok(r) => serde_json::to_value(r).expect("reports serialize"),
                Err(e) => serde_json::json!({ "cell": c.index, "error": e }),
            })
            .collect();
        let mut bytes = serde_json::to_vec_pretty(&reports)?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)?;
    }
    match &a.output {
        Some(p) => write_atomic(p, &csv)?,
        None => print!("{}", String::from_utf8_lossy(&csv)),
    }
    Ok(())
}

/// Integral values become JSON integers so count parameters accept them.
fn number(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 9e15 {
        Value::from(v as i64)
    } else {
        Value::from(v)
    }
}

fn dispatch(sub: Sub) -> Result<()> {
    macro_rules! one {
        ($cmd:expr, $a:expr) => {
            run_one(config_of($cmd, $a.params(), &$a.common), $a.common.trial_log.as_deref())
        };
    }
    match sub {
        Sub::TestOneSided(a) => one!(Command::TestOneSided, a),
        Sub::TestTwoSided(a) => one!(Command::TestTwoSided, a),
        Sub::GenDyes(a) => one!(Command::GenDyes, a),
        Sub::GenDno(a) => one!(Command::GenDno, a),
        Sub::Distinguish(a) => one!(Command::Distinguish, a),
        Sub::Shatter(a) => one!(Command::Shatter, a),
        Sub::Typicality(a) => one!(Command::Typicality, a),
        Sub::BoundaryVolume(a) => one!(Command::BoundaryVolume, a),
        Sub::BallTheorem(a) => one!(Command::BallTheorem, a),
        Sub::AppendixLemmas(a) => one!(Command::AppendixLemmas, a),
        Sub::Cover(a) => one!(Command::Cover, a),
        Sub::Sweep(a) => run_sweep(a),
    }
}

/// Parses `args`, runs the subcommand, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.sub) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    main_with_args(std::env::args_os())
}
