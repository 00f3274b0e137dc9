//! Non-private reference solver for excess-risk measurements.
//!
//! Quadratic tasks are solved in closed form. Other objectives use bisection
//! in one dimension and the central-cut ellipsoid method otherwise. The
//! ellipsoid method yields a lower bound f(x) − √(gᵀPg) at every objective
//! cut, so the returned gap certifies the value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{DataView, Domain, Loss, LossFamily, QuadraticOffset, Shape};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    pub point: Vec<f64>,
    pub value: f64,
    /// Certified upper bound on value − min.
    pub gap: f64,
    pub iterations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub tol: f64,
    pub max_iter: Option<u64>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { tol: 1e-8, max_iter: None }
    }
}

pub fn exact_erm_oracle(family: &LossFamily, data: DataView<'_>, domain: &Domain) -> Result<ExactSolution> {
    exact_erm_oracle_with(family, data, domain, OracleOptions::default())
}

pub fn exact_erm_oracle_with(family: &LossFamily, data: DataView<'_>, domain: &Domain, opts: OracleOptions) -> Result<ExactSolution> {
    linalg::check_dim(domain.dim(), data.dim())?;
    if data.is_empty() {
        return Err(Error::invalid("empty dataset"));
    }
    if family.loss == Loss::HalfSquared {
        return Ok(closed_form_quadratic(family, data, domain));
    }
    let f = |w: &[f64]| family.empirical_value(w, data);
    let g = |w: &[f64]| family.empirical_subgrad(w, data);
    if domain.dim() == 1 {
        return Ok(bisection(&f, &g, domain));
    }
    ellipsoid(&f, &g, domain, opts)
}

/// ½‖ω − x̄‖² plus offsets is an isotropic quadratic, minimized over K by
/// projecting its unconstrained minimizer.
fn closed_form_quadratic(family: &LossFamily, data: DataView<'_>, domain: &Domain) -> ExactSolution {
    let d = domain.dim();
    let mut mean = vec![0.0; d];
    for s in data.iter() {
        linalg::axpy(1.0 / data.len() as f64, s.x, &mut mean);
    }
    let h = QuadraticOffset::combine(&family.offsets, d);
    let w = 1.0 + 2.0 * h.coeff_lambda;
    let target: Vec<f64> = mean.iter().zip(&h.center).map(|(m, c)| (m + 2.0 * h.coeff_lambda * c) / w).collect();
    let point = domain.project(&target).expect("dimension checked");
    ExactSolution { value: family.empirical_value(&point, data), point, gap: 0.0, iterations: 0 }
}

fn interval(domain: &Domain) -> (f64, f64) {
    let (mut lo, mut hi) = match domain.shape() {
        Shape::Ball { center, radius } => (center[0] - radius, center[0] + radius),
        Shape::Box { lower, upper } => (lower[0], upper[0]),
    };
    if let Some((c, r)) = domain.restriction() {
        lo = lo.max(c[0] - r);
        hi = hi.min(c[0] + r);
    }
    (lo, hi)
}

fn bisection(f: &dyn Fn(&[f64]) -> f64, g: &dyn Fn(&[f64]) -> Vec<f64>, domain: &Domain) -> ExactSolution {
    let (mut a, mut b) = interval(domain);
    let mut iterations = 0;
    while b - a > 1e-15 * (1.0 + a.abs().max(b.abs())) && iterations < 200 {
        let m = 0.5 * (a + b);
        if g(&[m])[0] > 0.0 {
            b = m;
        } else {
            a = m;
        }
        iterations += 1;
    }
    let best = [a, b, 0.5 * (a + b)]
        .into_iter()
        .map(|x| (f(&[x]), x))
        .min_by(|p, q| p.0.total_cmp(&q.0))
        .expect("three candidates");
    let slope = g(&[a])[0].abs().max(g(&[b])[0].abs());
    ExactSolution { point: vec![best.1], value: best.0, gap: slope * (b - a), iterations }
}

fn enclosing_ball(domain: &Domain) -> (Vec<f64>, f64) {
    let base = match domain.shape() {
        Shape::Ball { center, radius } => (center.clone(), *radius),
        Shape::Box { lower, upper } => {
            let c: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect();
            let r = 0.5 * linalg::dist(lower, upper);
            (c, r)
        }
    };
    match domain.restriction() {
        Some((c, r)) if r < base.1 => (c.to_vec(), r),
        _ => base,
    }
}

fn ellipsoid(f: &dyn Fn(&[f64]) -> f64, g: &dyn Fn(&[f64]) -> Vec<f64>, domain: &Domain, opts: OracleOptions) -> Result<ExactSolution> {
    let d = domain.dim();
    let df = d as f64;
    let (mut x, r) = enclosing_ball(domain);
    let r = r * (1.0 + 1e-9) + 1e-12;
    let mut p = vec![0.0; d * d];
    for i in 0..d {
        p[i * d + i] = r * r;
    }
    let max_iter = opts.max_iter.unwrap_or(400 * (d as u64 + 1).pow(2) + 10_000);
    let start = domain.project(&x)?;
    let mut best = (f(&start), start);
    let mut lower = f64::NEG_INFINITY;
    let mut pg = vec![0.0; d];
    // The slight inflation keeps the minimizer inside the ellipsoid once
    // rounding makes P badly conditioned; without it the lower bound can
    // overshoot on degenerate problems.
    let shrink = (1.0 + 1.0 / (20.0 * df * df)) * df * df / (df * df - 1.0);
    let step = 1.0 / (df + 1.0);
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let cut = if domain.contains(&x, 0.0) {
            let fx = f(&x);
            let gx = g(&x);
            if fx < best.0 {
                best = (fx, x.clone());
            }
            if linalg::norm(&gx) == 0.0 {
                lower = lower.max(fx);
                break;
            }
            mat_vec(&p, &gx, &mut pg);
            let width = linalg::dot(&gx, &pg).max(0.0).sqrt();
            lower = lower.max(fx - width);
            if best.0 - lower <= opts.tol {
                break;
            }
            gx
        } else {
            // Projections of infeasible centers are feasible candidates too.
            let proj = domain.project(&x)?;
            let fp = f(&proj);
            let cut = linalg::sub(&x, &proj);
            if fp < best.0 {
                best = (fp, proj);
            }
            cut
        };
        mat_vec(&p, &cut, &mut pg);
        let gpg = linalg::dot(&cut, &pg);
        if !(gpg > 0.0) || !gpg.is_finite() {
            break;
        }
        let s = gpg.sqrt();
        for v in pg.iter_mut() {
            *v /= s;
        }
        linalg::axpy(-step, &pg, &mut x);
        let c = 2.0 * step;
        for i in 0..d {
            for j in i..d {
                let v = shrink * (p[i * d + j] - c * pg[i] * pg[j]);
                p[i * d + j] = v;
                p[j * d + i] = v;
            }
        }
    }
    let gap = best.0 - lower;
    if gap < -opts.tol {
        return Err(Error::Oracle(format!("ellipsoid lower bound exceeds best value by {:e}", -gap)));
    }
    let gap = gap.max(0.0);
    if !(gap <= opts.tol) {
        return Err(Error::Oracle(format!("ellipsoid method stopped after {iterations} iterations with gap {gap:e}")));
    }
    Ok(ExactSolution { point: best.1, value: best.0, gap, iterations })
}

fn mat_vec(p: &[f64], v: &[f64], out: &mut [f64]) {
    let d = v.len();
    for (i, o) in out.iter_mut().enumerate() {
        *o = linalg::dot(&p[i * d..(i + 1) * d], v);
    }
}
