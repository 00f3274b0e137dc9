//! Private AC-SA and the two ERM reductions built on it: doubling (warm
//! restarts with geometrically growing budgets) and regularization of a
//! merely convex objective.

use serde::{Deserialize, Serialize};

use crate::accountant::{self, AccountantConstants, ApproxDpBudget};
use crate::acsa::{self, AcsaParams};
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{regularize, DataView, Domain, LossFamily, QuadraticOffset};
use crate::sampling::Streams;
use crate::smoothing::{SmoothedOracle, SmoothedOracleConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivateAcsaConfig {
    pub steps_t: u64,
    pub batch_b: u64,
    pub sigma: f64,
    pub radius_r: f64,
    /// Strong convexity handed to AC-SA (data term plus 2λ of every offset).
    pub mu: f64,
    /// Smoothness; defaults to G√d/r.
    pub l_override: Option<f64>,
}

impl PrivateAcsaConfig {
    pub fn smoothness(&self, g: f64, d: usize) -> Result<f64> {
        if let Some(l) = self.l_override {
            return Ok(l);
        }
        if self.radius_r <= 0.0 {
            return Err(Error::Config("zero smoothing radius needs an explicit smoothness constant".into()));
        }
        Ok(g * (d as f64).sqrt() / self.radius_r)
    }

    pub fn gradient_count(&self) -> u64 {
        self.batch_b * self.steps_t
    }
}

/// One solver phase, as emitted into trial reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    /// Doubling-wrapper index (1-based; 0 outside any wrapper).
    pub outer_phase: usize,
    /// Index within the inner solver (1-based).
    pub phase: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub n_samples: usize,
    pub steps_t: u64,
    pub batch_b: u64,
    pub sigma: f64,
    pub radius_r: f64,
    pub gradient_count: u64,
    /// Objective value of the phase problem at its output (diagnostic only).
    pub risk: f64,
    pub ball_radius: Option<f64>,
    pub reg_lambda: Option<f64>,
    /// Why the phase returned its starting point, if it did.
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub point: Vec<f64>,
    pub gradient_count: u64,
    pub spent: ApproxDpBudget,
    pub phases: Vec<PhaseRecord>,
}

impl SolveOutput {
    /// The start point returned as is, spending nothing.
    pub fn unchanged(point: &[f64], record: PhaseRecord) -> Self {
        SolveOutput { point: point.to_vec(), gradient_count: 0, spent: ApproxDpBudget::zero(), phases: vec![record] }
    }

    /// Σ B·T over the phase records.
    pub fn phase_count_sum(&self) -> u64 {
        self.phases.iter().map(|p| p.gradient_count).sum()
    }
}

/// AC-SA on the smoothed objective with the noisy minibatch oracle and no
/// privacy accounting. The composite term is the family's folded offsets.
pub fn acsa_smoothed(
    family: &LossFamily,
    data: DataView<'_>,
    domain: &Domain,
    omega0: &[f64],
    cfg: &PrivateAcsaConfig,
    streams: &mut Streams,
) -> Result<(Vec<f64>, u64)> {
    let d = domain.dim();
    let l = cfg.smoothness(family.data_lipschitz(), d)?;
    let oracle_cfg = SmoothedOracleConfig {
        radius_r: cfg.radius_r,
        batch_b: usize::try_from(cfg.batch_b).map_err(|_| Error::Config("batch size overflows usize".into()))?,
        noise_sigma: cfg.sigma,
        data,
        family,
        domain,
    };
    let mut oracle = SmoothedOracle::new(oracle_cfg, streams.clone())?;
    let params = AcsaParams { steps: cfg.steps_t, mu: cfg.mu, l };
    let out = acsa::acsa_run(&mut oracle, &params, omega0, &family.composite(d), domain)?;
    *streams = oracle.into_streams();
    Ok((out.point, out.gradient_count))
}

/// Accounts the run first, then executes it. Validation failures return
/// before any sample is touched.
#[allow(clippy::too_many_arguments)]
pub fn private_acsa(
    family: &LossFamily,
    data: DataView<'_>,
    domain: &Domain,
    omega0: &[f64],
    budget: &ApproxDpBudget,
    cfg: &PrivateAcsaConfig,
    consts: &AccountantConstants,
    streams: &mut Streams,
) -> Result<SolveOutput> {
    let n = data.len() as u64;
    accountant::check_calibration_preconditions(cfg.batch_b, cfg.steps_t, n, budget, consts)?;
    let sensitivity = consts.sensitivity_scale * family.data_lipschitz();
    let pipeline = accountant::run_pipeline(sensitivity, cfg.sigma, cfg.batch_b, cfg.steps_t, n, budget.delta)?;
    if !pipeline.spent.within(budget) {
        return Err(Error::Calibration { achieved: pipeline.spent.epsilon, target: budget.epsilon });
    }
    let (point, count) = acsa_smoothed(family, data, domain, omega0, cfg, streams)?;
    debug_assert_eq!(count, cfg.gradient_count());
    let record = PhaseRecord {
        outer_phase: 0,
        phase: 1,
        epsilon: budget.epsilon,
        delta: budget.delta,
        n_samples: data.len(),
        steps_t: cfg.steps_t,
        batch_b: cfg.batch_b,
        sigma: cfg.sigma,
        radius_r: cfg.radius_r,
        gradient_count: count,
        risk: family.empirical_value(&point, data),
        ball_radius: None,
        reg_lambda: None,
        skipped: None,
    };
    Ok(SolveOutput { point, gradient_count: count, spent: pipeline.spent, phases: vec![record] })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Run(PrivateAcsaConfig),
    /// d·ln(1/δ) > ε²N²: any feasible point is good enough.
    Trivial,
}

/// T, B, σ and r for the strongly convex ERM rate.
pub fn erm_strongly_schedule(
    g: f64,
    diameter: f64,
    mu: f64,
    n: usize,
    d: usize,
    budget: &ApproxDpBudget,
    consts: &AccountantConstants,
) -> Result<Schedule> {
    let (eps, nf, df) = (budget.epsilon, n as f64, d as f64);
    let log_inv_delta = (1.0 / budget.delta).ln();
    if df * log_inv_delta / (eps * eps * nf * nf) > 1.0 {
        return Ok(Schedule::Trivial);
    }
    let d4 = df.powf(0.25);
    let t = (100.0 * eps * nf / (consts.c1 * d4 * log_inv_delta.sqrt())).ceil();
    let b = ((eps * nf * nf / (consts.c1 * t)).sqrt() + eps * eps * nf * nf / (df * log_inv_delta * t)).ceil();
    let (t, b) = (t as u64, b as u64);
    let sigma = accountant::calibrate_sigma(g, b, t, n as u64, budget, consts)?;
    Ok(Schedule::Run(PrivateAcsaConfig {
        steps_t: t,
        batch_b: b,
        sigma,
        radius_r: diameter / (t as f64 * d4),
        mu,
        l_override: None,
    }))
}

/// ⌈log₂ log₂ N³⌉, at least 1.
pub fn doubling_k(n: usize) -> u32 {
    let inner = 3.0 * (n.max(2) as f64).log2();
    (inner.log2().ceil() as u32).max(1)
}

/// Runs `solve(i, start, (ε/2^{k+1−i}, δ/2^{k+1−i}))` for i = 1..=k, each
/// warm-started from the previous output.
pub fn doubling_reduction<F>(n: usize, omega0: &[f64], budget: &ApproxDpBudget, k_override: Option<u32>, mut solve: F) -> Result<SolveOutput>
where
    F: FnMut(usize, &[f64], &ApproxDpBudget) -> Result<SolveOutput>,
{
    let k = k_override.unwrap_or_else(|| doubling_k(n));
    if k == 0 {
        return Err(Error::Config("doubling needs at least one phase".into()));
    }
    let mut point = omega0.to_vec();
    let mut count = 0u64;
    let mut spent = ApproxDpBudget::zero();
    let mut phases = Vec::new();
    for i in 1..=k as usize {
        let sub = budget.halved(k + 1 - i as u32);
        let out = solve(i, &point, &sub).map_err(|e| e.in_phase(i))?;
        count += out.gradient_count;
        spent = spent.plus(&out.spent);
        phases.extend(out.phases.into_iter().map(|mut p| {
            p.outer_phase = i;
            p
        }));
        point = out.point;
    }
    Ok(SolveOutput { point, gradient_count: count, spent, phases })
}

/// Record of a phase that returned its start point.
pub fn trivial_record(budget: &ApproxDpBudget, n: usize, reason: &str) -> PhaseRecord {
    PhaseRecord {
        outer_phase: 0,
        phase: 1,
        epsilon: budget.epsilon,
        delta: budget.delta,
        n_samples: n,
        steps_t: 0,
        batch_b: 0,
        sigma: 0.0,
        radius_r: 0.0,
        gradient_count: 0,
        risk: f64::NAN,
        ball_radius: None,
        reg_lambda: None,
        skipped: Some(reason.to_string()),
    }
}

/// Strongly convex ERM: doubling over the Private AC-SA schedule.
#[allow(clippy::too_many_arguments)]
pub fn erm_strongly(
    family: &LossFamily,
    data: DataView<'_>,
    domain: &Domain,
    omega0: &[f64],
    budget: &ApproxDpBudget,
    consts: &AccountantConstants,
    k_override: Option<u32>,
    streams: &mut Streams,
) -> Result<SolveOutput> {
    if !(family.strong_mu > 0.0) {
        return Err(Error::precondition("strongly convex family (mu > 0)"));
    }
    let (n, d) = (data.len(), domain.dim());
    let g = family.data_lipschitz();
    doubling_reduction(n, omega0, budget, k_override, |_, start, sub| {
        match erm_strongly_schedule(g, domain.diameter(), family.strong_mu, n, d, sub, consts)? {
            Schedule::Trivial => Ok(SolveOutput::unchanged(start, trivial_record(sub, n, "trivial regime"))),
            Schedule::Run(cfg) => private_acsa(family, data, domain, start, sub, &cfg, consts, streams),
        }
    })
}

/// u = scale·G√(d ln(1/δ))/(DεN).
pub fn regularization_weight(g: f64, diameter: f64, d: usize, n: usize, budget: &ApproxDpBudget, scale: f64) -> f64 {
    scale * g * (d as f64 * (1.0 / budget.delta).ln()).sqrt() / (diameter * budget.epsilon * n as f64)
}

/// Convex ERM: add u‖ω − ω_0‖² and solve the strongly convex problem, or
/// return ω_0 when uD > G.
#[allow(clippy::too_many_arguments)]
pub fn erm_general(
    family: &LossFamily,
    data: DataView<'_>,
    domain: &Domain,
    omega0: &[f64],
    budget: &ApproxDpBudget,
    consts: &AccountantConstants,
    u_scale: f64,
    streams: &mut Streams,
) -> Result<SolveOutput> {
    linalg::check_dim(domain.dim(), omega0.len())?;
    let g = family.data_lipschitz();
    let diam = domain.diameter();
    let u = regularization_weight(g, diam, domain.dim(), data.len(), budget, u_scale);
    if u * diam > g {
        return Ok(SolveOutput::unchanged(omega0, trivial_record(budget, data.len(), "u D > G")));
    }
    let reg = regularize(family, &QuadraticOffset::new(u, omega0.to_vec())?, domain)?;
    erm_strongly(&reg, data, domain, omega0, budget, consts, None, streams)
}
