//! The `marginforge` command surface.
//!
//! Exit codes: 0 ok, 1 any other failure, 2 not converged (artifacts are still
//! written), 3 oracle budget exceeded, 4 model and data widths disagree.
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use crate::booster::{Algorithm, BoosterConfig};
use crate::error::{Error, Result};
use crate::io::{load_dataset, load_model, load_raw, save_model, write_atomic, write_log, DataFormat};
use crate::learner::{PoolOracle, StumpLearner, StumpPool};
use crate::lp::solve_edge_min;
use crate::model::Dataset;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

/// Default cap on `pool size × m` for the exact oracle.
pub const DEFAULT_ORACLE_BUDGET: usize = 2_000_000;

pub const BENCH_HEADER: &str = "algo,nu_frac,seed,iterations,seconds,final_soft_margin,converged";

#[derive(Debug, Parser)]
#[command(name = "marginforge", version, about = "Soft-margin boosting with decision stumps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one booster and write the model and its iteration log.
    Train(RunManifest),
    /// Solve the soft-margin LP over the full stump pool.
    Oracle(OracleArgs),
    /// Predict labels with a saved model.
    Predict(PredictArgs),
    /// Sweep algorithms and capping fractions, writing one CSV row per cell.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: DataFormat,
}

/// Everything that determines a training run.
#[derive(Debug, Clone, Args)]
pub struct RunManifest {
    #[command(flatten)]
    pub input: DataArgs,
    #[arg(long, default_value = "mlpb-ss")]
    pub algo: Algorithm,
    /// ν as a fraction of the number of examples, in (0, 1].
    #[arg(long, default_value_t = 0.1)]
    pub nu_frac: f64,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    /// Defaults to the iteration bound plus a small slack.
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    #[arg(long)]
    pub log_out: Option<PathBuf>,
    #[arg(long)]
    pub timeout_secs: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: DataArgs,
    #[arg(long, default_value_t = 0.1)]
    pub nu_frac: f64,
    /// Largest accepted `pool size × m`.
    #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub input: DataArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: DataArgs,
    #[arg(long, value_delimiter = ',', default_value = "lpboost,mlpb-ss")]
    pub algo: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    pub nu_frac: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where the sweep CSV goes; standard output when absent.
    #[arg(long)]
    pub log_out: Option<PathBuf>,
    #[arg(long)]
    pub timeout_secs: Option<f64>,
}

/// `ν = nu_frac · m` clamped to `[1, m]`.
pub fn resolve_nu(nu_frac: f64, m: usize) -> Result<f64> {
    if !(nu_frac > 0.0 && nu_frac <= 1.0) {
        return Err(Error::Config(format!("nu_frac must lie in (0, 1], got {}", nu_frac)));
    }
    Ok((nu_frac * m as f64).clamp(1.0, m as f64))
}

fn timeout(secs: Option<f64>) -> Result<Option<Duration>> {
    secs.map(|s| {
        Duration::try_from_secs_f64(s).map_err(|_| Error::Config(format!("bad timeout {}", s)))
    })
    .transpose()
}

fn base_config(eps: f64, nu: f64, max_iters: Option<usize>, seed: u64, limit: Option<Duration>) -> BoosterConfig {
    let mut config = BoosterConfig::new(eps, nu).seed(seed);
    config.max_iterations = max_iters;
    config.time_limit = limit;
    config
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let _ = write!(err, "{}", e);
            if e.use_stderr() {
                EXIT_FAILURE
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Train(m) => cmd_train(&m, out),
        Command::Oracle(a) => cmd_oracle(&a, out),
        Command::Predict(a) => cmd_predict(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            EXIT_FAILURE
        }
    }
}

pub fn cmd_train(manifest: &RunManifest, out: &mut dyn Write) -> Result<i32> {
    let data = load_dataset(&manifest.input.data, manifest.input.format)?;
    let nu = resolve_nu(manifest.nu_frac, data.len())?;
    let config = base_config(
        manifest.eps,
        nu,
        manifest.max_iters,
        manifest.seed,
        timeout(manifest.timeout_secs)?,
    );
    let learner = StumpLearner::new(&data);
    let outcome = manifest.algo.run(&learner, &config)?;
    if let Some(path) = &manifest.model_out {
        save_model(path, &outcome.model)?;
    }
    if let Some(path) = &manifest.log_out {
        write_log(path, &outcome.records)?;
    }
    let summary = json!({
        "algo": manifest.algo.name(),
        "nu": nu,
        "iterations": outcome.iterations(),
        "converged": outcome.converged,
        "soft_margin": outcome.model.soft_margin,
        "smoothed": outcome.model.smoothed,
    });
    writeln!(out, "{}", summary)?;
    Ok(if outcome.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

/// Exact soft-margin optimum over every distinct stump, with its support size.
pub fn oracle_rho_star(data: &Dataset, nu: f64) -> Result<(f64, usize)> {
    let pool = StumpPool::new(data);
    let oracle = PoolOracle::from_stumps(data, &pool)?;
    let sol = solve_edge_min(oracle.matrix(), nu)?;
    Ok((sol.rho, sol.w.support_len()))
}

pub fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> Result<i32> {
    let data = load_dataset(&args.input.data, args.input.format)?;
    let nu = resolve_nu(args.nu_frac, data.len())?;
    let entries = StumpPool::new(&data).len().saturating_mul(data.len());
    if entries > args.budget {
        writeln!(
            out,
            "{}",
            json!({"error": format!("pool size × m = {} exceeds the budget of {}", entries, args.budget)})
        )?;
        return Ok(EXIT_BUDGET);
    }
    let (rho_star, support_size) = oracle_rho_star(&data, nu)?;
    writeln!(out, "{}", json!({"rho_star": rho_star, "support_size": support_size}))?;
    Ok(EXIT_OK)
}

pub fn cmd_predict(args: &PredictArgs, out: &mut dyn Write) -> Result<i32> {
    let model = load_model(&args.model)?;
    let raw = load_raw(&args.input.data, args.input.format)?;
    if raw.rows.is_empty() {
        return Err(Error::Input("no rows to predict".into()));
    }
    let width = raw.rows[0].len();
    let needed = model.hypotheses.iter().map(|h| h.feature + 1).max().unwrap_or(0);
    if model.num_features.is_some_and(|p| p != width) || needed > width {
        writeln!(
            out,
            "{}",
            json!({"error": format!("model expects {} features, data has {}", model.num_features.unwrap_or(needed), width)})
        )?;
        return Ok(EXIT_MISMATCH);
    }
    let mut wrong = 0usize;
    let mut text = String::new();
    for (i, row) in raw.rows.iter().enumerate() {
        let y = model.predict(row)?;
        text.push_str(if y > 0.0 { "1\n" } else { "-1\n" });
        if let Some(labels) = &raw.labels {
            if labels[i] != y {
                wrong += 1;
            }
        }
    }
    out.write_all(text.as_bytes())?;
    if raw.labels.is_some() {
        writeln!(out, "{}", json!({"error_rate": wrong as f64 / raw.rows.len() as f64}))?;
    }
    Ok(EXIT_OK)
}

/// One finished cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algo: Algorithm,
    pub nu_frac: f64,
    pub seed: u64,
    pub iterations: usize,
    pub seconds: f64,
    pub final_soft_margin: f64,
    /// `"true"`, `"false"` or `"timed_out"`.
    pub status: &'static str,
}

impl BenchRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{},{}",
            self.algo, self.nu_frac, self.seed, self.iterations, self.seconds, self.final_soft_margin, self.status
        )
    }
}

/// Worker count for sweeps: `MARGINFORGE_THREADS` when set and positive.
pub fn bench_threads() -> Option<usize> {
    std::env::var("MARGINFORGE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

pub fn run_bench(data: &Dataset, args: &BenchArgs) -> Result<Vec<BenchRow>> {
    let limit = timeout(args.timeout_secs)?;
    let cells: Vec<(Algorithm, f64)> = args
        .algo
        .iter()
        .flat_map(|&a| args.nu_frac.iter().map(move |&f| (a, f)))
        .collect();
    for &(_, f) in &cells {
        resolve_nu(f, data.len())?;
    }
    let learner = StumpLearner::new(data);
    let run_cell = |&(algo, nu_frac): &(Algorithm, f64)| -> Result<BenchRow> {
        let nu = resolve_nu(nu_frac, data.len())?;
        let config = base_config(args.eps, nu, args.max_iters, args.seed, limit);
        let start = Instant::now();
        let outcome = algo.run(&learner, &config)?;
        Ok(BenchRow {
            algo,
            nu_frac,
            seed: args.seed,
            iterations: outcome.iterations(),
            seconds: start.elapsed().as_secs_f64(),
            final_soft_margin: outcome.model.soft_margin,
            status: if outcome.timed_out {
                "timed_out"
            } else if outcome.converged {
                "true"
            } else {
                "false"
            },
        })
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = bench_threads() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {}", e)))?;
    pool.install(|| cells.par_iter().map(run_cell).collect())
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let data = load_dataset(&args.input.data, args.input.format)?;
    let rows = run_bench(&data, args)?;
    let mut csv = String::from(BENCH_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.to_csv_line());
        csv.push('\n');
    }
    match &args.log_out {
        Some(path) => write_atomic(path, csv.as_bytes())?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(EXIT_OK)
}
