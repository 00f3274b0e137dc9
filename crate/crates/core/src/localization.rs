//! Iterative localization for private SCO. Phase i solves a regularized ERM
//! on its own disjoint block of samples, restricted to a ball around the
//! previous output whose radius shrinks geometrically.

use serde::{Deserialize, Serialize};

use crate::accountant::{self, AccountantConstants, ApproxDpBudget};
use crate::erm::{self, PhaseRecord, PrivateAcsaConfig, SolveOutput};
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{regularize, DataView, Domain, LossFamily, QuadraticOffset};
use crate::sampling::Streams;

const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalPhase {
    pub i: usize,
    pub epsilon: f64,
    pub delta: f64,
    /// Block [start, start + n) of the dataset.
    pub start: usize,
    pub n: usize,
    pub eta: f64,
    pub ball_radius: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationSchedule {
    pub k: usize,
    pub eta: f64,
    pub phases: Vec<LocalPhase>,
}

/// η = (D/G)·min(1/√N, ε/√(d ln(1/δ))), k = ⌈log₂ N⌉, and per phase
/// ε_i = ε/2^i, δ_i = δ/2^i, N_i = ⌊N/2^i⌋ (the remainder goes to the last
/// phase), η_i = η/32^i.
pub fn make_schedule(g: f64, diameter: f64, n: usize, d: usize, budget: &ApproxDpBudget) -> Result<LocalizationSchedule> {
    if n < 2 {
        return Err(Error::invalid(format!("localization needs N >= 2, got {n}")));
    }
    if !(g > 0.0 && diameter > 0.0) {
        return Err(Error::invalid("G and D must be positive"));
    }
    let nf = n as f64;
    let eta = diameter / g * (1.0 / nf.sqrt()).min(budget.epsilon / (d as f64 * (1.0 / budget.delta).ln()).sqrt());
    let k = (nf.log2().ceil() as usize).max(1);
    let mut phases = Vec::with_capacity(k);
    let mut start = 0;
    for i in 1..=k {
        let ni = n >> i;
        if ni == 0 {
            continue;
        }
        let sub = budget.halved(i as u32);
        phases.push(LocalPhase { i, epsilon: sub.epsilon, delta: sub.delta, start, n: ni, eta: eta / 32f64.powi(i as i32), ball_radius: 0.0, lambda: 0.0 });
        start += ni;
    }
    if let Some(last) = phases.last_mut() {
        last.n += n - start;
    }
    for p in &mut phases {
        p.ball_radius = 2.0 * g * p.eta * p.n as f64;
        p.lambda = 1.0 / (p.eta * p.n as f64);
    }
    Ok(LocalizationSchedule { k, eta, phases })
}

/// T = 400⌈min(√N d^{1/4}, Nε/(d^{1/4}√ln(1/δ)))⌉, B = ⌈N/T + N√(ε/T)⌉,
/// r = D_i/(T d^{1/4}). `mu` is filled in by the caller.
pub fn phase_erm_schedule(
    g: f64,
    n: usize,
    d: usize,
    budget: &ApproxDpBudget,
    diameter: f64,
    consts: &AccountantConstants,
) -> Result<PrivateAcsaConfig> {
    if n == 0 {
        return Err(Error::invalid("phase needs at least one sample"));
    }
    let (nf, d4) = (n as f64, (d as f64).powf(0.25));
    let m = (nf.sqrt() * d4).min(nf * budget.epsilon / (d4 * (1.0 / budget.delta).ln().sqrt()));
    let t = 400 * m.ceil().max(1.0) as u64;
    let b = (nf / t as f64 + nf * (budget.epsilon / t as f64).sqrt()).ceil() as u64;
    let sigma = accountant::calibrate_sigma(g, b, t, n as u64, budget, consts)?;
    Ok(PrivateAcsaConfig { steps_t: t, batch_b: b, sigma, radius_r: diameter / (t as f64 * d4), mu: 0.0, l_override: None })
}

/// Runs every phase of `schedule`. A phase whose accountant preconditions
/// cannot be met (typically B > N_i/10 on tiny blocks) returns its start
/// point and is flagged in the record.
#[allow(clippy::too_many_arguments)]
pub fn localize_with(
    schedule: &LocalizationSchedule,
    family: &LossFamily,
    data: DataView<'_>,
    domain: &Domain,
    omega0: &[f64],
    consts: &AccountantConstants,
    streams: &mut Streams,
) -> Result<SolveOutput> {
    localize_observed(schedule, family, data, domain, omega0, consts, streams, |_, _, _| {})
}

/// [`localize_with`] that reports every completed phase as
/// `(phase, center ω_{i−1}, output ω_i)`.
#[allow(clippy::too_many_arguments)]
pub fn localize_observed<F>(
    schedule: &LocalizationSchedule,
    family: &LossFamily,
    data: DataView<'_>,
    domain: &Domain,
    omega0: &[f64],
    consts: &AccountantConstants,
    streams: &mut Streams,
    mut observer: F,
) -> Result<SolveOutput>
where
    F: FnMut(&LocalPhase, &[f64], &[f64]),
{
    let d = domain.dim();
    linalg::check_dim(d, omega0.len())?;
    let g = family.data_lipschitz();
    let mut point = omega0.to_vec();
    let mut count = 0;
    let mut spent = ApproxDpBudget::zero();
    let mut records = Vec::with_capacity(schedule.phases.len());
    for p in &schedule.phases {
        let block = data.range(p.start, p.start + p.n)?;
        let budget = ApproxDpBudget::new(p.epsilon, p.delta)?;
        let local = domain.localized(&point, p.ball_radius)?;
        let offset = QuadraticOffset::new(p.lambda, point.clone())?;
        let phase_family = regularize(family, &offset, &local)?;
        let base_record = PhaseRecord {
            outer_phase: 0,
            phase: p.i,
            epsilon: p.epsilon,
            delta: p.delta,
            n_samples: p.n,
            steps_t: 0,
            batch_b: 0,
            sigma: 0.0,
            radius_r: 0.0,
            gradient_count: 0,
            risk: f64::NAN,
            ball_radius: Some(p.ball_radius),
            reg_lambda: Some(p.lambda),
            skipped: None,
        };
        let mut cfg = match phase_erm_schedule(g, p.n, d, &budget, local.diameter(), consts) {
            Ok(cfg) => cfg,
            Err(Error::Precondition { inequality }) => {
                records.push(PhaseRecord { skipped: Some(inequality), ..base_record });
                continue;
            }
            Err(e) => return Err(e.in_phase(p.i)),
        };
        cfg.mu = phase_family.strong_mu;
        let out = erm::private_acsa(&phase_family, block, &local, &point, &budget, &cfg, consts, streams)
            .map_err(|e| e.in_phase(p.i))?;
        if !local.contains(&out.point, MEMBERSHIP_TOL) {
            return Err(Error::Oracle(format!("phase {} output left its localized domain", p.i)));
        }
        observer(p, &point, &out.point);
        count += out.gradient_count;
        spent = spent.plus(&out.spent);
        records.push(PhaseRecord {
            steps_t: cfg.steps_t,
            batch_b: cfg.batch_b,
            sigma: cfg.sigma,
            radius_r: cfg.radius_r,
            gradient_count: out.gradient_count,
            risk: phase_family.empirical_value(&out.point, block),
            ..base_record
        });
        point = out.point;
    }
    Ok(SolveOutput { point, gradient_count: count, spent, phases: records })
}

pub fn localize(
    family: &LossFamily,
    data: DataView<'_>,
    domain: &Domain,
    omega0: &[f64],
    budget: &ApproxDpBudget,
    consts: &AccountantConstants,
    streams: &mut Streams,
) -> Result<SolveOutput> {
    let schedule = make_schedule(family.data_lipschitz(), domain.diameter(), data.len(), domain.dim(), budget)?;
    localize_with(&schedule, family, data, domain, omega0, consts, streams)
}

/// Sample counts ⌊N/2^{k+1−i}⌋ of the doubling wrapper, as contiguous blocks.
pub fn wrapper_blocks(n: usize, k: u32) -> Vec<(usize, usize)> {
    let mut start = 0;
    (1..=k)
        .map(|i| {
            let len = n >> (k + 1 - i);
            let block = (start, start + len);
            start += len;
            block
        })
        .collect()
}

/// Strongly convex SCO: the doubling wrapper around [`localize`], phase i
/// using its own block of ⌊N/2^{k+1−i}⌋ fresh samples.
#[allow(clippy::too_many_arguments)]
pub fn sco_strongly(
    family: &LossFamily,
    data: DataView<'_>,
    domain: &Domain,
    omega0: &[f64],
    budget: &ApproxDpBudget,
    consts: &AccountantConstants,
    k_override: Option<u32>,
    streams: &mut Streams,
) -> Result<SolveOutput> {
    let n = data.len();
    let k = k_override.unwrap_or_else(|| erm::doubling_k(n));
    let blocks = wrapper_blocks(n, k);
    erm::doubling_reduction(n, omega0, budget, Some(k), |i, start, sub| {
        let (lo, hi) = blocks[i - 1];
        if hi - lo < 2 {
            return Err(Error::precondition(format!("wrapper phase needs >= 2 samples, got {}", hi - lo)));
        }
        localize(family, data.range(lo, hi)?, domain, start, sub, consts, streams)
    })
}
