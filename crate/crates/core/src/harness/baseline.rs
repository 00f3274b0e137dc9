//! Noisy projected SGD with batch size 1 and per-step noise
//! σ = G√(ln(1/δ))/ε, run for N² steps. Its privacy follows from the cited
//! schedule and is not re-derived here; it serves as a complexity baseline.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::accountant::ApproxDpBudget;
use crate::erm::{PhaseRecord, SolveOutput};
use crate::error::Result;
use crate::linalg;
use crate::problem::{DataView, Domain, LossFamily};
use crate::sampling::{self, Streams};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DpsgdConfig {
    /// Upper bound on the number of steps; `None` runs the full N².
    pub step_cap: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpsgdOutput {
    pub solve: SolveOutput,
    pub steps: u64,
    pub capped: bool,
    pub sigma: f64,
}

pub fn dpsgd_sigma(g: f64, budget: &ApproxDpBudget) -> f64 {
    g * (1.0 / budget.delta).ln().sqrt() / budget.epsilon
}

pub fn dpsgd_baseline(
    family: &LossFamily,
    data: DataView<'_>,
    domain: &Domain,
    omega0: &[f64],
    budget: &ApproxDpBudget,
    cfg: &DpsgdConfig,
    streams: &mut Streams,
) -> Result<DpsgdOutput> {
    let d = domain.dim();
    linalg::check_dim(d, omega0.len())?;
    let n = data.len();
    let full = (n as u64).saturating_mul(n as u64);
    let steps = cfg.step_cap.map_or(full, |c| full.min(c.max(1)));
    let g = family.data_lipschitz();
    let sigma = dpsgd_sigma(g, budget);
    let g_eff = (g * g + d as f64 * sigma * sigma).sqrt();
    let eta = domain.diameter() / (g_eff * (steps as f64).sqrt());

    let mut w = domain.project(omega0)?;
    let mut avg = vec![0.0; d];
    let mut grad = vec![0.0; d];
    for t in 0..steps {
        let i = streams.subsample.random_range(0..n);
        grad.fill(0.0);
        family.loss.accumulate_subgrad(&w, data.sample(i), 1.0, &mut grad);
        for o in &family.offsets {
            o.accumulate_grad(&w, &mut grad);
        }
        sampling::add_gaussian(sigma, &mut grad, &mut streams.noise);
        linalg::axpy(-eta, &grad, &mut w);
        domain.project_in_place(&mut w);
        let k = 1.0 / (t + 1) as f64;
        for (a, x) in avg.iter_mut().zip(&w) {
            *a += k * (x - *a);
        }
    }
    let record = PhaseRecord {
        outer_phase: 0,
        phase: 1,
        epsilon: budget.epsilon,
        delta: budget.delta,
        n_samples: n,
        steps_t: steps,
        batch_b: 1,
        sigma,
        radius_r: 0.0,
        gradient_count: steps,
        risk: family.empirical_value(&avg, data),
        ball_radius: None,
        reg_lambda: None,
        skipped: None,
    };
    Ok(DpsgdOutput {
        solve: SolveOutput { point: avg, gradient_count: steps, spent: *budget, phases: vec![record] },
        steps,
        capped: steps < full,
        sigma,
    })
}
