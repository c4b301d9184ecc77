//! The `xychain` command line: argument parsing, dispatch and exit codes.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 configuration or engine error.

pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use xychain_core::sweep::{
    default_horizon, field_sweep, oracle_compare, random_grid, resonance_report, time_series, uniform_grid,
    CompareReport, STRUCTURE_TOL,
};
use xychain_core::{ChainParams, Engine, Error, SweepConfig};

use crate::output::{emit, field_sweep_csv, time_series_csv, to_json, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BREACH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

pub const THREADS_ENV: &str = "XYCHAIN_THREADS";

#[derive(Debug, Parser)]
#[command(name = "xychain", version, about = "Entanglement dynamics of the cyclic XY spin chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// a(t), C1, C2 and the C2 parity channel on a uniform time grid.
    TimeSeries(TimeSeriesArgs),
    /// Maxima over time of C1 and of C2 per channel, for a range of fields.
    FieldSweep(FieldSweepArgs),
    /// Time series on and near one resonance, as a JSON report.
    Resonance(ResonanceArgs),
    /// Compares the analytic engine with the exact oracle on random points.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineArg {
    Analytic,
    Oracle,
    Both,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Analytic => Engine::Analytic,
            EngineArg::Oracle => Engine::Oracle,
            EngineArg::Both => Engine::Both,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChainArgs {
    /// Number of spins.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Hopping v = (v_x + v_y)/4; times are in units of 1/v.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub v: f64,
    /// Anisotropy g = (v_x − v_y)/4.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub g: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TimeSeriesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
    /// Transverse field.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub b: f64,
    /// Time horizon; defaults to 10π over the slowest mode frequency, capped at 1e4.
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 4096)]
    pub t_steps: usize,
    #[arg(long, value_enum, default_value_t = EngineArg::Analytic)]
    pub engine: EngineArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FieldSweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
    #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
    pub b_min: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub b_max: f64,
    #[arg(long, default_value_t = 401)]
    pub b_steps: usize,
    /// Fixed time horizon for every field; per-field default when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 4096)]
    pub t_steps: usize,
    /// Golden-section refinement of each grid maximum.
    #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = ArgAction::Set)]
    pub refine: bool,
    #[arg(long, value_enum, default_value_t = EngineArg::Analytic)]
    pub engine: EngineArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ResonanceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub chain: ChainArgs,
    /// Resonance index j in 1..=(n−1)/2.
    #[arg(long)]
    pub mode: usize,
    /// Time horizon; defaults to 10π/λ_j.
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 4096)]
    pub t_steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Comma-separated chain lengths (odd, at most 13).
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,9")]
    pub n_list: Vec<usize>,
    /// Largest allowed |analytic − oracle| per observable.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random (b, v, g, t) points per chain length.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Config(String),
    Breach,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Config(format!("serialization error: {e}"))
    }
}

/// Parses `args` (including the program name) and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = threads_from_env().and_then(|threads| match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Failure::Config(format!("cannot start thread pool: {e}")))?
            .install(|| dispatch(&cli.command, threads)),
        None => dispatch(&cli.command, None),
    });
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Breach) => EXIT_BREACH,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
    }
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => Err(Failure::Usage(format!("{THREADS_ENV} must be an integer >= 1, got '{s}'"))),
        },
    }
}

fn manifest(command: &str, config_echo: Value, started: Instant) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        config_echo,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time: started.elapsed().as_secs_f64(),
    }
}

fn dispatch(command: &Command, threads: Option<usize>) -> Result<(), Failure> {
    let started = Instant::now();
    match command {
        Command::TimeSeries(a) => cmd_time_series(a, threads, started),
        Command::FieldSweep(a) => cmd_field_sweep(a, threads, started),
        Command::Resonance(a) => cmd_resonance(a, threads, started),
        Command::Verify(a) => cmd_verify(a, threads, started),
    }
}

fn echo<T: Serialize>(args: &T, extra: Value) -> Result<Value, Failure> {
    let mut v = serde_json::to_value(args)?;
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    Ok(v)
}

fn cmd_time_series(a: &TimeSeriesArgs, threads: Option<usize>, started: Instant) -> Result<(), Failure> {
    let params = ChainParams::new(a.chain.n, a.b, a.chain.v, a.chain.g)?;
    if a.t_steps < 2 {
        return Err(Failure::Usage(format!("--t-steps must be at least 2, got {}", a.t_steps)));
    }
    let engine = Engine::from(a.engine);
    engine.check(&params)?;
    let (t_max, policy) = match a.t_max {
        Some(t) => (t, "explicit"),
        None => (default_horizon(&params), "10*pi/lambda_min capped at 1e4"),
    };
    let grid = uniform_grid(t_max, a.t_steps)?;
    let rows = time_series(&params, &grid, engine)?;
    let text = match a.format {
        Format::Csv => time_series_csv(&rows),
        Format::Json => to_json(&rows)?,
    };
    let config = echo(a, json!({ "t_max": t_max, "t_max_policy": policy, "threads": threads, "time_unit": "1/v" }))?;
    emit(&text, a.out.as_deref(), &manifest("time-series", config, started))?;
    Ok(())
}

fn cmd_field_sweep(a: &FieldSweepArgs, threads: Option<usize>, started: Instant) -> Result<(), Failure> {
    let config = SweepConfig {
        params: ChainParams::new(a.chain.n, a.b_min, a.chain.v, a.chain.g)?,
        b_range: (a.b_min, a.b_max, a.b_steps),
        t_horizon: a.t_max,
        t_steps: a.t_steps,
        refine: a.refine,
        engine: a.engine.into(),
    };
    let rows = field_sweep(&config)?;
    let text = match a.format {
        Format::Csv => field_sweep_csv(&rows),
        Format::Json => to_json(&rows)?,
    };
    let policy = if a.t_max.is_some() { "explicit" } else { "per field: 10*pi/lambda_min capped at 1e4" };
    let echo = echo(a, json!({ "t_max_policy": policy, "threads": threads, "time_unit": "1/v" }))?;
    emit(&text, a.out.as_deref(), &manifest("field-sweep", echo, started))?;
    Ok(())
}

fn cmd_resonance(a: &ResonanceArgs, threads: Option<usize>, started: Instant) -> Result<(), Failure> {
    let params = ChainParams::new(a.chain.n, 0.0, a.chain.v, a.chain.g)?;
    let report = resonance_report(&params, a.mode, a.t_max, a.t_steps)?;
    let text = to_json(&report)?;
    let echo = echo(a, json!({ "t_max": report.t_horizon, "threads": threads, "time_unit": "1/v" }))?;
    emit(&text, a.out.as_deref(), &manifest("resonance", echo, started))?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct VerifyEntry {
    n: usize,
    passed: bool,
    #[serde(flatten)]
    report: CompareReport,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    tolerance: f64,
    structure_tolerance: f64,
    seed: u64,
    points: usize,
    passed: bool,
    results: Vec<VerifyEntry>,
}

fn cmd_verify(a: &VerifyArgs, threads: Option<usize>, started: Instant) -> Result<(), Failure> {
    if !(a.tolerance.is_finite() && a.tolerance >= 0.0) {
        return Err(Failure::Usage(format!("--tolerance must be a non-negative number, got {}", a.tolerance)));
    }
    if a.n_list.is_empty() || a.points == 0 {
        return Err(Failure::Usage("need at least one chain length and one point".into()));
    }
    let grid = random_grid(a.points, a.seed);
    let mut results = Vec::with_capacity(a.n_list.len());
    for &n in &a.n_list {
        let report = oracle_compare(n, &grid)?;
        results.push(VerifyEntry { n, passed: report.passes(a.tolerance), report });
    }
    let passed = results.iter().all(|r| r.passed);
    for r in &results {
        eprintln!(
            "n = {:>2}: max field deviation {:.3e}, wick {:.3e}, structure {:.3e} -> {}",
            r.n,
            r.report.deviation.max(),
            r.report.wick,
            r.report.structure_max(),
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    let report = VerifyReport {
        tolerance: a.tolerance,
        structure_tolerance: STRUCTURE_TOL,
        seed: a.seed,
        points: a.points,
        passed,
        results,
    };
    let text = to_json(&report)?;
    let echo = echo(a, json!({ "threads": threads }))?;
    emit(&text, a.out.as_deref(), &manifest("verify", echo, started))?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Breach)
    }
}
