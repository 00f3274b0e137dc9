//! Accelerated stochastic approximation (AC-SA) for composite objectives
//! Ψ(ω) = f(ω) + h(ω) over a convex set K, where f is L-smooth and
//! μ-strongly convex and h is a [`QuadraticOffset`].
//!
//! Each iteration t ≥ 1 uses α_t = 2/(t+2) and γ_t = 4L/(t(t+1)):
//! an extrapolated query point ω^md, one stochastic gradient there, a
//! closed-form proximal step, and the aggregate update
//! ω^ag_t = α_t ω_t + (1 − α_t) ω^ag_{t−1}.
//!
//! `mu` is the usual modulus, f(v) ≥ f(w) + ⟨∇f(w), v − w⟩ + (μ/2)‖v − w‖².
//! The md-point and prox formulas are written with unhalved squared norms, so
//! they use μ/2 (see [`AcsaState::mu_sq`]).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{Domain, QuadraticOffset};

/// Tolerance for the "iterates stay in K" check.
const MEMBERSHIP_TOL: f64 = 1e-9;

/// A stochastic first-order oracle. Each query consumes `batch_size`
/// per-sample gradient evaluations.
pub trait StochasticOracle {
    fn batch_size(&self) -> u64;

    fn dim(&self) -> usize;

    /// Writes an (unbiased) gradient estimate at `point` into `out`.
    fn query(&mut self, point: &[f64], out: &mut [f64]) -> Result<()>;
}

/// Adapts a closure into an oracle with a fixed batch size.
pub struct FnOracle<F> {
    dim: usize,
    batch: u64,
    f: F,
}

impl<F> FnOracle<F>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    pub fn new(dim: usize, batch: u64, f: F) -> Self {
        FnOracle { dim, batch, f }
    }
}

impl<F> StochasticOracle for FnOracle<F>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    fn batch_size(&self) -> u64 {
        self.batch
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn query(&mut self, point: &[f64], out: &mut [f64]) -> Result<()> {
        (self.f)(point, out)
    }
}

/// Iterate triple and step parameters. `t` counts started iterations; before
/// the first step t = 0 and `omega`/`omega_ag` hold ω_0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcsaState {
    pub t: u64,
    pub omega: Vec<f64>,
    pub omega_ag: Vec<f64>,
    pub omega_md: Vec<f64>,
    pub alpha_t: f64,
    pub gamma_t: f64,
    pub mu: f64,
    pub l: f64,
}

impl AcsaState {
    pub fn new(omega0: Vec<f64>, mu: f64, l: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Config(format!("smoothness L must be positive and finite, got {l}")));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::Config(format!("strong convexity mu must be finite and >= 0, got {mu}")));
        }
        linalg::check_finite(&omega0)?;
        Ok(AcsaState {
            t: 0,
            omega_ag: omega0.clone(),
            omega_md: omega0.clone(),
            omega: omega0,
            alpha_t: 1.0,
            gamma_t: f64::INFINITY,
            mu,
            l,
        })
    }

    /// Strong convexity with respect to ‖·‖² (rather than ½‖·‖²).
    pub fn mu_sq(&self) -> f64 {
        0.5 * self.mu
    }

    /// Moves to iteration t+1 and sets α_t, γ_t.
    pub fn begin_step(&mut self) {
        self.t += 1;
        let t = self.t as f64;
        self.alpha_t = 2.0 / (t + 2.0);
        self.gamma_t = 4.0 * self.l / (t * (t + 1.0));
    }
}

/// ω^md_t, the convex combination of ω^ag_{t−1} and ω_{t−1}.
pub fn acsa_md_point(state: &AcsaState) -> Result<Vec<f64>> {
    let (a, g, mu) = (state.alpha_t, state.gamma_t, state.mu_sq());
    let denom = g + (1.0 - a * a) * mu;
    if !(denom > 0.0 && denom.is_finite()) {
        return Err(Error::Config(format!("md-point denominator gamma + (1 - alpha^2) mu = {denom} must be positive")));
    }
    let w_ag = (1.0 - a) * (mu + g) / denom;
    let w_prev = a * ((1.0 - a) * mu + g) / denom;
    Ok(state.omega_ag.iter().zip(&state.omega).map(|(ag, w)| w_ag * ag + w_prev * w).collect())
}

/// Minimizes α[⟨G, ω⟩ + λ‖ω − c‖² + μ̃‖ω^md − ω‖²] + [(1−α)μ̃ + γ]‖ω_{t−1} − ω‖²
/// with μ̃ = μ/2
/// over K. The objective is an isotropic quadratic, so the constrained
/// minimizer is the projection of the unconstrained one.
pub fn acsa_prox_step(state: &AcsaState, grad: &[f64], h: &QuadraticOffset, domain: &Domain) -> Result<Vec<f64>> {
    let d = state.omega.len();
    linalg::check_dim(d, grad.len())?;
    linalg::check_dim(d, h.center.len())?;
    if !(h.coeff_lambda >= 0.0) {
        return Err(Error::invalid(format!("composite coefficient must be >= 0, got {}", h.coeff_lambda)));
    }
    let mut out = vec![0.0; d];
    prox_into(state, grad, h, &mut out);
    domain.project_in_place(&mut out);
    Ok(out)
}

#[inline]
fn prox_into(state: &AcsaState, grad: &[f64], h: &QuadraticOffset, out: &mut [f64]) {
    let (a, g, mu, lam) = (state.alpha_t, state.gamma_t, state.mu_sq(), h.coeff_lambda);
    let prev_w = 2.0 * ((1.0 - a) * mu + g);
    let denom = 2.0 * a * lam + 2.0 * mu + 2.0 * g;
    let md_w = 2.0 * a * mu;
    let c_w = 2.0 * a * lam;
    for i in 0..out.len() {
        let num = c_w * h.center[i] + md_w * state.omega_md[i] + prev_w * state.omega[i] - a * grad[i];
        out[i] = num / denom;
    }
}

/// Run length and step-schedule constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcsaParams {
    pub steps: u64,
    pub mu: f64,
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcsaOutcome {
    /// ω^ag_T
    pub point: Vec<f64>,
    pub gradient_count: u64,
    pub state: AcsaState,
}

/// Per-iteration callback.
pub trait AcsaObserver {
    fn on_step(&mut self, state: &AcsaState, step_norm: f64) -> Result<()>;
}

impl<F> AcsaObserver for F
where
    F: FnMut(&AcsaState, f64) -> Result<()>,
{
    fn on_step(&mut self, state: &AcsaState, step_norm: f64) -> Result<()> {
        self(state, step_norm)
    }
}

/// Writes `t,psi,step_norm` rows, with Ψ evaluated at ω^ag_t.
pub struct CsvTrace<W: Write, P: Fn(&[f64]) -> f64> {
    out: W,
    psi: P,
    header_written: bool,
}

impl<W: Write, P: Fn(&[f64]) -> f64> CsvTrace<W, P> {
    pub fn new(out: W, psi: P) -> Self {
        CsvTrace { out, psi, header_written: false }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write, P: Fn(&[f64]) -> f64> AcsaObserver for CsvTrace<W, P> {
    fn on_step(&mut self, state: &AcsaState, step_norm: f64) -> Result<()> {
        if !self.header_written {
            writeln!(self.out, "t,psi,step_norm")?;
            self.header_written = true;
        }
        writeln!(self.out, "{},{:e},{:e}", state.t, (self.psi)(&state.omega_ag), step_norm)?;
        Ok(())
    }
}

struct NoObserver;

impl AcsaObserver for NoObserver {
    fn on_step(&mut self, _: &AcsaState, _: f64) -> Result<()> {
        Ok(())
    }
}

/// Runs `params.steps` AC-SA iterations from ω_0 and returns ω^ag_T.
pub fn acsa_run<O: StochasticOracle + ?Sized>(
    oracle: &mut O,
    params: &AcsaParams,
    omega0: &[f64],
    h: &QuadraticOffset,
    domain: &Domain,
) -> Result<AcsaOutcome> {
    acsa_run_observed(oracle, params, omega0, h, domain, &mut NoObserver)
}

pub fn acsa_run_observed<O: StochasticOracle + ?Sized>(
    oracle: &mut O,
    params: &AcsaParams,
    omega0: &[f64],
    h: &QuadraticOffset,
    domain: &Domain,
    observer: &mut dyn AcsaObserver,
) -> Result<AcsaOutcome> {
    let d = domain.dim();
    linalg::check_dim(d, omega0.len())?;
    linalg::check_dim(d, oracle.dim())?;
    linalg::check_dim(d, h.center.len())?;
    if params.steps == 0 {
        return Err(Error::Config("AC-SA needs at least one step".into()));
    }
    if !domain.contains(omega0, MEMBERSHIP_TOL) {
        return Err(Error::precondition("omega_0 in K"));
    }
    let mut state = AcsaState::new(omega0.to_vec(), params.mu, params.l)?;
    let batch = oracle.batch_size();
    let mut count: u64 = 0;
    let mut grad = vec![0.0; d];
    let mut next = vec![0.0; d];
    for _ in 0..params.steps {
        state.begin_step();
        state.omega_md = acsa_md_point(&state)?;
        grad.fill(0.0);
        oracle.query(&state.omega_md, &mut grad)?;
        count += batch;
        prox_into(&state, &grad, h, &mut next);
        domain.project_in_place(&mut next);
        let step_norm = linalg::dist(&next, &state.omega);
        let a = state.alpha_t;
        for i in 0..d {
            state.omega_ag[i] = a * next[i] + (1.0 - a) * state.omega_ag[i];
        }
        std::mem::swap(&mut state.omega, &mut next);
        if !(domain.contains(&state.omega, MEMBERSHIP_TOL)
            && domain.contains(&state.omega_ag, MEMBERSHIP_TOL)
            && domain.contains(&state.omega_md, MEMBERSHIP_TOL))
        {
            return Err(Error::Oracle(format!("iterate left K at step {}", state.t)));
        }
        observer.on_step(&state, step_norm)?;
    }
    Ok(AcsaOutcome { point: state.omega_ag.clone(), gradient_count: count, state })
}
