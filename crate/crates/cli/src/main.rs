mod plot;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dpsco_core::accountant::{self, AccountantConstants, ApproxDpBudget};
use dpsco_core::harness::{self, check_report, Algo, DpsgdConfig, ExperimentConfig, TaskKind};

#[derive(Parser)]
#[command(name = "dpsco", version, about = "Private convex optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run trials of one configuration and write report.json and trials.csv.
    Run(RunArgs),
    /// Print the privacy accounting pipeline for a single schedule as JSON.
    Account(AccountArgs),
    /// Run a grid over N, d and ε and fit log-log slopes.
    Sweep(SweepArgs),
    /// Render an SVG log-log plot from a report CSV.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct ExperimentArgs {
    #[arg(long, default_value = "hinge")]
    task: String,
    #[arg(long, default_value = "erm-general")]
    algo: String,
    #[arg(long, default_value_t = 1e-5)]
    delta: f64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Dataset seed; trial j uses seed + j.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Explicit trial seeds, overriding --trials.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    sensitivity_scale: Option<f64>,
    /// Fresh samples drawn for the population loss (0 disables).
    #[arg(long, default_value_t = 0)]
    population_samples: usize,
    /// Step ceiling for the DP-SGD baseline.
    #[arg(long)]
    dpsgd_step_cap: Option<u64>,
    /// Record per-trial wall time (makes reports non-reproducible).
    #[arg(long)]
    wall_time: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with a nonzero status if any report assertion fails.
    #[arg(long)]
    check: bool,
}

impl ExperimentArgs {
    fn config(&self, n: usize, dim: usize, eps: f64) -> Result<ExperimentConfig> {
        let task: TaskKind = self.task.parse()?;
        let algo: Algo = self.algo.parse()?;
        let mut cfg = ExperimentConfig::new(task, algo, n, dim, eps, self.delta);
        cfg.trials = self.trials;
        cfg.seed = self.seed;
        cfg.seeds = self.seeds.clone();
        cfg.constants = constants(self.c1, self.c2, self.sensitivity_scale);
        cfg.population_samples = self.population_samples;
        cfg.dpsgd = DpsgdConfig { step_cap: self.dpsgd_step_cap };
        cfg.record_wall_time = self.wall_time;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn constants(c1: Option<f64>, c2: Option<f64>, scale: Option<f64>) -> AccountantConstants {
    let d = AccountantConstants::default();
    AccountantConstants { c1: c1.unwrap_or(d.c1), c2: c2.unwrap_or(d.c2), sensitivity_scale: scale.unwrap_or(d.sensitivity_scale) }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    eps: f64,
    #[command(flatten)]
    exp: ExperimentArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    epss: Vec<f64>,
    #[command(flatten)]
    exp: ExperimentArgs,
}

#[derive(Args)]
struct AccountArgs {
    /// Lipschitz constant G.
    #[arg(long)]
    g: f64,
    /// Batch size B.
    #[arg(long)]
    b: u64,
    /// Steps T.
    #[arg(long)]
    t: u64,
    /// Dataset size N.
    #[arg(long)]
    n: u64,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1e-5)]
    delta: f64,
    /// Use this noise scale instead of calibrating one.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    sensitivity_scale: Option<f64>,
}

#[derive(Args)]
struct ReportArgs {
    /// trials.csv or sweep.csv.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "n")]
    x: String,
    #[arg(long, value_delimiter = ',', default_value = "risk_mean")]
    y: Vec<String>,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether all requested checks passed.
fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(a) => run(a),
        Command::Account(a) => account(a),
        Command::Sweep(a) => sweep(a),
        Command::Report(a) => {
            plot::render(&a.input, &a.x, &a.y, &a.out)?;
            Ok(true)
        }
    }
}

fn run(a: RunArgs) -> Result<bool> {
    let cfg = a.exp.config(a.n, a.dim, a.eps)?;
    let report = harness::run_experiment(&cfg)?;
    match &a.exp.out {
        Some(dir) => {
            report.write_to_dir(dir).with_context(|| format!("writing {}", dir.display()))?;
            log::info!("wrote {}", dir.display());
        }
        None => report.write_json(std::io::stdout().lock())?,
    }
    let agg = &report.aggregates;
    let summary = match agg.excess_empirical_risk {
        Some(m) => format!("excess risk {:.4e} ± {:.2e}", m.mean, m.std),
        None => "no successful trials".to_string(),
    };
    eprintln!("{} on {}: {} trials, {} failed, {summary}", cfg.algo, cfg.task, agg.trials, agg.failures);
    if !a.exp.check {
        return Ok(true);
    }
    let outcomes = check_report(&report);
    for o in &outcomes {
        eprintln!("[{}] {} {}", if o.passed { "pass" } else { "FAIL" }, o.name, o.detail);
    }
    Ok(outcomes.iter().all(|o| o.passed))
}

fn sweep(a: SweepArgs) -> Result<bool> {
    let base = a.exp.config(a.ns[0], a.dims[0], a.epss[0])?;
    let report = harness::run_sweep(&base, &a.ns, &a.dims, &a.epss)?;
    match &a.exp.out {
        Some(dir) => report.write_to_dir(dir)?,
        None => {
            let mut out = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
    }
    if let Some(axis) = &report.axis {
        let s = &report.slopes;
        eprintln!("slopes vs {axis}: risk {:?}, population {:?}, gradient count {:?}", s.risk, s.population, s.gradient_count);
    }
    let failures: usize = report.points.iter().map(|p| p.aggregates.failures).sum();
    if a.exp.check && failures > 0 {
        eprintln!("[FAIL] {failures} failed trials across the sweep");
        return Ok(false);
    }
    Ok(true)
}

fn account(a: AccountArgs) -> Result<bool> {
    let budget = ApproxDpBudget::new(a.eps, a.delta)?;
    let consts = constants(a.c1, a.c2, a.sensitivity_scale);
    let (pipeline, calibrated) = match a.sigma {
        Some(sigma) => (accountant::run_pipeline(consts.sensitivity_scale * a.g, sigma, a.b, a.t, a.n, a.delta)?, false),
        None => (accountant::calibrate(a.g, a.b, a.t, a.n, &budget, &consts)?.pipeline, true),
    };
    if !pipeline.spent.epsilon.is_finite() {
        bail!("the pipeline produced a non-finite epsilon");
    }
    let within = pipeline.spent.within(&budget);
    let value = serde_json::json!({
        "budget": budget,
        "constants": consts,
        "calibrated": calibrated,
        "pipeline": pipeline,
        "within_budget": within,
    });
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(within)
}
