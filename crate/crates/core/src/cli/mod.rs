//! The `harnack-lab` command line.
//!
//! ```text
//! harnack-lab <bound|minimize|solve|verify|hoelder> [flags] [--config FILE] [--out DIR] [--seed N]
//! ```
//!
//! A JSON config file holds one optional parameter block per subcommand plus
//! `seed`, `out` and `svg`; flags override the file. Exit codes: 0 success,
//! 1 inequality violations, 2 configuration or parameter error, 3 solver
//! non-convergence.

mod bound;
mod hoelder;
mod minimize;
mod solve;
pub mod svg;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

pub use bound::{BoundCmd, BoundKind, BoundParams, BOUND_CSV_HEADER};
pub use hoelder::{HoelderCmd, CHAIN_CSV_HEADER, CYLINDER_CSV_HEADER, HOELDER_CSV_HEADER};
pub use minimize::{MinimizeCmd, WeightKind, MINIMIZE_CSV_HEADER};
pub use solve::{SolveCmd, SolveEquation, SolveParams, REFINE_CSV_HEADER, SOLVE_CSV_HEADER};
pub use verify::{VerifyCheck, VerifyCmd, VerifyParams, WEAK_CSV_HEADER};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "HARNACK_LAB_THREADS";

/// Output directory used when neither `--out` nor the config sets one.
pub const DEFAULT_OUT: &str = "harnack-lab-out";

#[derive(Debug, Parser)]
#[command(
    name = "harnack-lab",
    version,
    about = "Harnack inequalities for parabolic equations, checked numerically"
)]
pub struct Cli {
    /// JSON file with parameter blocks; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory for CSV, JSON and SVG outputs.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed of every random draw.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Also write SVG line plots.
    #[arg(long, global = true)]
    pub svg: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a two-point Harnack bound.
    Bound(BoundCmd),
    /// Minimize the weighted path energy and compare with the closed form.
    Minimize(MinimizeCmd),
    /// Run a finite-difference solver, optionally as a refinement study.
    Solve(SolveCmd),
    /// Check a gradient estimate or Harnack inequality on a solution.
    Verify(VerifyCmd),
    /// Oscillation decay and Hölder bound on a heat-equation grid.
    Hoelder(HoelderCmd),
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub svg: Option<bool>,
    pub bound: Option<BoundParams>,
    pub minimize: Option<minimize::MinimizeParams>,
    pub solve: Option<SolveParams>,
    pub verify: Option<VerifyParams>,
    pub hoelder: Option<hoelder::HoelderParamsBlock>,
}

impl RunConfig {
    /// Parses a config file; serde reports the line, column and field of a bad entry.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Configuration(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Configuration(format!("{}: {e}", path.display())))
    }
}

/// Whether a finished run found inequality violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Clean,
    Violations,
}

impl Status {
    pub fn from_violations(any: bool) -> Self {
        if any {
            Self::Violations
        } else {
            Self::Clean
        }
    }
}

/// Exit code of a failed run.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::NonConvergence(_) => 3,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

/// Settings shared by every subcommand after the config overlay.
pub struct Context {
    pub seed: u64,
    pub out: Output,
}

/// Writes CSV, JSON and SVG files into the output directory.
pub struct Output {
    dir: PathBuf,
    svg: bool,
}

impl Output {
    pub fn new(dir: PathBuf, svg: bool) -> Self {
        Self { dir, svg }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Creates the directory and returns the path of `name` inside it.
    pub fn path(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir).map_err(|e| {
            Error::Configuration(format!("cannot create {}: {e}", self.dir.display()))
        })?;
        Ok(self.dir.join(name))
    }

    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let path = self.path(name)?;
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Writes a plot when SVG output is enabled; failures only warn.
    pub fn plot(&self, name: &str, chart: &svg::Chart) {
        if !self.svg {
            return;
        }
        let written = self
            .path(name)
            .and_then(|p| fs::write(&p, chart.render()).map_err(Error::from));
        if let Err(e) = written {
            eprintln!("warning: plot {name} not written: {e}");
        }
    }
}

/// Merges flags over a config block (flags win), rejects parameters outside
/// `allowed` and deserializes the result.
pub(crate) fn overlay<T>(flags: &T, block: Option<&T>, allowed: &[&str], context: &str) -> Result<T>
where
    T: Serialize + DeserializeOwned,
{
    let mut merged = match block {
        Some(b) => into_map(b)?,
        None => Map::new(),
    };
    for (k, v) in into_map(flags)? {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    let mut extra: Vec<&str> = merged
        .iter()
        .filter(|(k, v)| !v.is_null() && !allowed.contains(&k.as_str()))
        .map(|(k, _)| k.as_str())
        .collect();
    if !extra.is_empty() {
        extra.sort_unstable();
        return Err(Error::Configuration(format!(
            "{} not used by `{context}` (accepted: {})",
            extra.join(", "),
            allowed.join(", ")
        )));
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| Error::Configuration(format!("{context}: {e}")))
}

fn into_map<T: Serialize>(v: &T) -> Result<Map<String, Value>> {
    match serde_json::to_value(v)? {
        Value::Object(m) => Ok(m),
        other => Err(Error::Internal(format!(
            "parameter block serialized to {other}"
        ))),
    }
}

pub(crate) fn required<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Configuration(format!("missing parameter `{name}`")))
}

pub(crate) fn range_pair(v: &Option<Vec<f64>>, name: &str, default: [f64; 2]) -> Result<[f64; 2]> {
    match v.as_deref() {
        None => Ok(default),
        Some([a, b]) => Ok([*a, *b]),
        Some(other) => Err(Error::Configuration(format!(
            "`{name}` needs two values lo,hi, got {}",
            other.len()
        ))),
    }
}

pub(crate) fn join(v: &[f64]) -> String {
    v.iter()
        .map(|&x| crate::compact(x))
        .collect::<Vec<_>>()
        .join(";")
}

pub(crate) fn opt(v: Option<f64>) -> String {
    v.map(crate::compact).unwrap_or_default()
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Configuration(format!(
            "{THREADS_ENV} must be a positive integer, got {raw:?}"
        ))
    })?;
    // A second call in the same process fails harmlessly.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<Status> {
    configure_threads()?;
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = Context {
        seed: cli.seed.or(config.seed).unwrap_or(0),
        out: Output::new(
            cli.out
                .clone()
                .or_else(|| config.out.clone())
                .unwrap_or_else(|| DEFAULT_OUT.into()),
            cli.svg || config.svg.unwrap_or(false),
        ),
    };
    match &cli.command {
        Command::Bound(cmd) => bound::run(cmd, config.bound.as_ref(), &ctx),
        Command::Minimize(cmd) => minimize::run(cmd, config.minimize.as_ref(), &ctx),
        Command::Solve(cmd) => solve::run(cmd, config.solve.as_ref(), &ctx),
        Command::Verify(cmd) => verify::run(cmd, config.verify.as_ref(), &ctx),
        Command::Hoelder(cmd) => hoelder::run(cmd, config.hoelder.as_ref(), &ctx),
    }
}

/// Entry point of the `harnack-lab` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Violations) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
