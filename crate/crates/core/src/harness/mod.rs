//! Experiment runner: task generation, solver dispatch with exact gradient
//! accounting, excess-risk measurement against a certified optimum, and
//! JSON/CSV reports.

mod baseline;
mod oracle;
mod report;
mod task;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use baseline::{dpsgd_baseline, dpsgd_sigma, DpsgdConfig, DpsgdOutput};
pub use oracle::{exact_erm_oracle, exact_erm_oracle_with, ExactSolution, OracleOptions};
pub use report::{check_report, fit_loglog_slope, Aggregates, CheckOutcome, MeanStd, Report, SweepPoint, SweepReport, SCHEMA_VERSION};
pub use task::{TaskInstance, TaskKind, TaskParams};

use crate::accountant::{AccountantConstants, ApproxDpBudget};
use crate::erm::{self, PhaseRecord, Schedule, SolveOutput};
use crate::error::{Error, Result};
use crate::linalg;
use crate::localization;
use crate::problem::{DataView, Dataset};
use crate::sampling::{RandomStream, StreamRole, Streams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    PrivateAcsa,
    ErmGeneral,
    Localize,
    ScoStrongly,
    DpsgdBaseline,
}

impl Algo {
    pub const ALL: [Algo; 5] = [Algo::PrivateAcsa, Algo::ErmGeneral, Algo::Localize, Algo::ScoStrongly, Algo::DpsgdBaseline];

    pub fn name(self) -> &'static str {
        match self {
            Algo::PrivateAcsa => "private-acsa",
            Algo::ErmGeneral => "erm-general",
            Algo::Localize => "localize",
            Algo::ScoStrongly => "sco-strongly",
            Algo::DpsgdBaseline => "dpsgd-baseline",
        }
    }

    /// Whether the algorithm targets the population loss.
    pub fn is_sco(self) -> bool {
        matches!(self, Algo::Localize | Algo::ScoStrongly)
    }
}

impl std::str::FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| Error::Config(format!("unknown algorithm '{s}'")))
    }
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    pub algo: Algo,
    pub n: usize,
    pub dim: usize,
    pub eps: f64,
    pub delta: f64,
    /// Seeds the dataset; trial j uses algorithm seed `seed + j` unless
    /// `seeds` lists them explicitly.
    pub seed: u64,
    pub trials: usize,
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub constants: AccountantConstants,
    /// Proportionality constant of the convex-to-strongly-convex weight u.
    #[serde(default = "one")]
    pub u_scale: f64,
    #[serde(default)]
    pub task_params: TaskParams,
    #[serde(default)]
    pub dpsgd: DpsgdConfig,
    /// Size of the fresh sample used for population loss (0 disables it).
    #[serde(default)]
    pub population_samples: usize,
    #[serde(default)]
    pub record_wall_time: bool,
}

fn one() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn new(task: TaskKind, algo: Algo, n: usize, dim: usize, eps: f64, delta: f64) -> Self {
        ExperimentConfig {
            task,
            algo,
            n,
            dim,
            eps,
            delta,
            seed: 0,
            trials: 1,
            seeds: Vec::new(),
            constants: AccountantConstants::default(),
            u_scale: 1.0,
            task_params: TaskParams::default(),
            dpsgd: DpsgdConfig::default(),
            population_samples: 0,
            record_wall_time: false,
        }
    }

    pub fn budget(&self) -> Result<ApproxDpBudget> {
        ApproxDpBudget::new(self.eps, self.delta)
    }

    pub fn trial_seeds(&self) -> Vec<u64> {
        if self.seeds.is_empty() {
            (0..self.trials as u64).map(|j| self.seed.wrapping_add(j)).collect()
        } else {
            self.seeds.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 && self.seeds.is_empty() {
            return Err(Error::Config("at least one trial is required".into()));
        }
        if self.n < 2 || self.dim == 0 {
            return Err(Error::Config(format!("need N >= 2 and d >= 1, got N={} d={}", self.n, self.dim)));
        }
        self.budget()?;
        self.constants.validate()?;
        if !(self.u_scale > 0.0 && self.u_scale.is_finite()) {
            return Err(Error::Config(format!("u scale must be positive, got {}", self.u_scale)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub seed: u64,
    pub digest: String,
    pub excess_empirical_risk: f64,
    pub excess_population_loss: Option<f64>,
    pub gradient_count: u64,
    pub spent: ApproxDpBudget,
    pub wall_time_ms: Option<f64>,
    pub phases: Vec<PhaseRecord>,
    /// DP-SGD only: whether the N² step count was capped.
    pub capped: Option<bool>,
    pub error: Option<String>,
}

/// Runs one solver with its own streams.
pub fn solve(cfg: &ExperimentConfig, task: &TaskInstance, data: DataView<'_>, streams: &mut Streams) -> Result<(SolveOutput, Option<bool>)> {
    let budget = cfg.budget()?;
    let (family, domain, w0, consts) = (&task.family, &task.domain, &task.omega0, &cfg.constants);
    let out = match cfg.algo {
        Algo::PrivateAcsa => {
            let sched = erm::erm_strongly_schedule(family.data_lipschitz(), domain.diameter(), family.strong_mu, data.len(), domain.dim(), &budget, consts)?;
            match sched {
                Schedule::Run(c) => erm::private_acsa(family, data, domain, w0, &budget, &c, consts, streams)?,
                Schedule::Trivial => SolveOutput::unchanged(w0, erm::trivial_record(&budget, data.len(), "trivial regime")),
            }
        }
        Algo::ErmGeneral => erm::erm_general(family, data, domain, w0, &budget, consts, cfg.u_scale, streams)?,
        Algo::Localize => localization::localize(family, data, domain, w0, &budget, consts, streams)?,
        Algo::ScoStrongly => localization::sco_strongly(family, data, domain, w0, &budget, consts, None, streams)?,
        Algo::DpsgdBaseline => {
            let out = dpsgd_baseline(family, data, domain, w0, &budget, &cfg.dpsgd, streams)?;
            return Ok((out.solve, Some(out.capped)));
        }
    };
    Ok((out, None))
}

/// Everything shared by the trials of one configuration.
pub struct Prepared {
    pub task: TaskInstance,
    pub optimum: ExactSolution,
    pub population: Option<(Dataset, ExactSolution)>,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    cfg.validate()?;
    let task = TaskInstance::generate(cfg.task, cfg.n, cfg.dim, cfg.seed, &cfg.task_params)?;
    let optimum = exact_erm_oracle(&task.family, task.data.view(), &task.domain)?;
    let population = if cfg.population_samples > 0 {
        let mut rng = RandomStream::for_role(cfg.seed, StreamRole::Evaluation);
        let eval = task.fresh_samples(cfg.population_samples, &mut rng)?;
        let opt = exact_erm_oracle(&task.family, eval.view(), &task.domain)?;
        Some((eval, opt))
    } else {
        None
    };
    Ok(Prepared { task, optimum, population })
}

pub fn run_trial(cfg: &ExperimentConfig, prep: &Prepared, seed: u64) -> TrialResult {
    let started = Instant::now();
    let mut streams = Streams::new(seed);
    let data = prep.task.data.view();
    match solve(cfg, &prep.task, data, &mut streams) {
        Ok((out, capped)) => {
            let family = &prep.task.family;
            let excess = family.empirical_value(&out.point, data) - prep.optimum.value;
            let pop = prep.population.as_ref().map(|(eval, opt)| family.empirical_value(&out.point, eval.view()) - opt.value);
            TrialResult {
                seed,
                digest: linalg::digest(&out.point),
                excess_empirical_risk: excess,
                excess_population_loss: pop,
                gradient_count: out.gradient_count,
                spent: out.spent,
                wall_time_ms: cfg.record_wall_time.then(|| started.elapsed().as_secs_f64() * 1e3),
                phases: out.phases,
                capped,
                error: None,
            }
        }
        Err(e) => TrialResult {
            seed,
            digest: String::new(),
            excess_empirical_risk: f64::NAN,
            excess_population_loss: None,
            gradient_count: 0,
            spent: ApproxDpBudget::zero(),
            wall_time_ms: None,
            phases: Vec::new(),
            capped: None,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every trial (in parallel) and folds the results in seed order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    let prep = prepare(cfg)?;
    let seeds = cfg.trial_seeds();
    let trials: Vec<TrialResult> = seeds.par_iter().map(|&s| run_trial(cfg, &prep, s)).collect();
    Ok(Report::new(cfg.clone(), &prep, trials))
}

/// One experiment per grid point of `ns × dims × epss`.
pub fn run_sweep(base: &ExperimentConfig, ns: &[usize], dims: &[usize], epss: &[f64]) -> Result<SweepReport> {
    let mut points = Vec::new();
    for &n in ns {
        for &dim in dims {
            for &eps in epss {
                let cfg = ExperimentConfig { n, dim, eps, ..base.clone() };
                let report = run_experiment(&cfg)?;
                points.push(SweepPoint { n, dim, eps, aggregates: report.aggregates });
            }
        }
    }
    Ok(SweepReport::new(base.clone(), points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for a in Algo::ALL {
            assert_eq!(a.name().parse::<Algo>().unwrap(), a);
        }
        for t in TaskKind::ALL {
            assert_eq!(t.name().parse::<TaskKind>().unwrap(), t);
        }
        assert!("nope".parse::<Algo>().is_err());
    }

    #[test]
    fn quadratic_excess_uses_closed_form() {
        let mut cfg = ExperimentConfig::new(TaskKind::Quadratic, Algo::ErmGeneral, 512, 4, 1.0, 1e-5);
        cfg.trials = 2;
        let prep = prepare(&cfg).unwrap();
        assert_eq!(prep.optimum.gap, 0.0);
        let report = run_experiment(&cfg).unwrap();
        for t in &report.trials {
            assert!(t.error.is_none(), "{:?}", t.error);
            assert!(t.excess_empirical_risk >= -1e-12);
            assert_eq!(t.gradient_count, t.phases.iter().map(|p| p.gradient_count).sum::<u64>());
        }
    }

    #[test]
    fn reports_are_replayable() {
        let mut cfg = ExperimentConfig::new(TaskKind::Hinge, Algo::ErmGeneral, 256, 4, 1.0, 1e-5);
        cfg.trials = 3;
        let a = serde_json::to_string(&run_experiment(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_experiment(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn failures_are_recorded_per_trial() {
        // c2 = 1 is too small for the accountant to certify the budget.
        let mut cfg = ExperimentConfig::new(TaskKind::Hinge, Algo::PrivateAcsa, 1024, 4, 1.0, 1e-5);
        cfg.constants.c2 = 1.0;
        cfg.trials = 2;
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.trials.len(), 2);
        assert!(report.trials.iter().all(|t| t.error.is_some()));
        assert_eq!(report.aggregates.failures, 2);
    }
}
