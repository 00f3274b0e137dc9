use serde::{Deserialize, Serialize};

use super::data::{DataView, SampleRef};
use super::domain::Domain;
use crate::error::{Error, Result};
use crate::linalg;

/// Per-sample convex losses with a closed-form subgradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    /// max(0, 1 − y⟨ω, x⟩)
    Hinge,
    /// ‖ω − x‖₂ (the label is ignored)
    Distance,
    /// ½‖ω − x‖₂² (the label is ignored)
    HalfSquared,
    /// y⟨ω, x⟩
    Linear,
}

impl Loss {
    #[inline]
    pub fn value(&self, w: &[f64], s: SampleRef<'_>) -> f64 {
        match self {
            Loss::Hinge => (1.0 - s.y * linalg::dot(w, s.x)).max(0.0),
            Loss::Distance => linalg::dist(w, s.x),
            Loss::HalfSquared => 0.5 * linalg::dist_sq(w, s.x),
            Loss::Linear => s.y * linalg::dot(w, s.x),
        }
    }

    /// Adds `weight · ∂f(w, s)` into `out`.
    #[inline]
    pub fn accumulate_subgrad(&self, w: &[f64], s: SampleRef<'_>, weight: f64, out: &mut [f64]) {
        match self {
            Loss::Hinge => {
                if s.y * linalg::dot(w, s.x) < 1.0 {
                    linalg::axpy(-weight * s.y, s.x, out);
                }
            }
            Loss::Distance => {
                let d = linalg::dist(w, s.x);
                if d > 0.0 {
                    let k = weight / d;
                    for ((o, wi), xi) in out.iter_mut().zip(w).zip(s.x) {
                        *o += k * (wi - xi);
                    }
                }
            }
            Loss::HalfSquared => {
                for ((o, wi), xi) in out.iter_mut().zip(w).zip(s.x) {
                    *o += weight * (wi - xi);
                }
            }
            Loss::Linear => linalg::axpy(weight * s.y, s.x, out),
        }
    }
}

/// Hinge loss value and subgradient at `w` for one labelled sample.
pub fn hinge_loss_subgrad(w: &[f64], x: &[f64], y: f64) -> Result<(Vec<f64>, f64)> {
    linalg::check_dim(w.len(), x.len())?;
    let s = SampleRef { x, y };
    let mut g = vec![0.0; w.len()];
    Loss::Hinge.accumulate_subgrad(w, s, 1.0, &mut g);
    Ok((g, Loss::Hinge.value(w, s)))
}

/// The data-independent term λ‖ω − c‖₂². Its strong-convexity modulus under
/// the ½-factor convention is 2λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticOffset {
    pub coeff_lambda: f64,
    pub center: Vec<f64>,
}

impl QuadraticOffset {
    pub fn new(coeff_lambda: f64, center: Vec<f64>) -> Result<Self> {
        if !(coeff_lambda >= 0.0 && coeff_lambda.is_finite()) {
            return Err(Error::invalid(format!("offset coefficient must be finite and >= 0, got {coeff_lambda}")));
        }
        linalg::check_finite(&center)?;
        Ok(QuadraticOffset { coeff_lambda, center })
    }

    pub fn zero(dim: usize) -> Self {
        QuadraticOffset { coeff_lambda: 0.0, center: vec![0.0; dim] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff_lambda == 0.0
    }

    pub fn strong_convexity(&self) -> f64 {
        2.0 * self.coeff_lambda
    }

    #[inline]
    pub fn value(&self, w: &[f64]) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.coeff_lambda * linalg::dist_sq(w, &self.center)
        }
    }

    #[inline]
    pub fn accumulate_grad(&self, w: &[f64], out: &mut [f64]) {
        if self.is_zero() {
            return;
        }
        let k = 2.0 * self.coeff_lambda;
        for ((o, wi), ci) in out.iter_mut().zip(w).zip(&self.center) {
            *o += k * (wi - ci);
        }
    }

    /// A single offset equal to the sum of `offsets` up to an additive
    /// constant (same gradient everywhere).
    pub fn combine(offsets: &[QuadraticOffset], dim: usize) -> QuadraticOffset {
        let total: f64 = offsets.iter().map(|o| o.coeff_lambda).sum();
        if total == 0.0 {
            return QuadraticOffset::zero(dim);
        }
        let mut center = vec![0.0; dim];
        for o in offsets {
            linalg::axpy(o.coeff_lambda / total, &o.center, &mut center);
        }
        QuadraticOffset { coeff_lambda: total, center }
    }
}

/// A data term plus zero or more quadratic offsets, with the Lipschitz
/// constant G over K_r and strong-convexity modulus μ (½-factor convention).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossFamily {
    pub loss: Loss,
    pub offsets: Vec<QuadraticOffset>,
    pub lipschitz_g: f64,
    pub strong_mu: f64,
    data_lipschitz: f64,
    data_strong_mu: f64,
}

impl LossFamily {
    pub fn new(loss: Loss, lipschitz_g: f64, strong_mu: f64) -> Result<Self> {
        if !(lipschitz_g >= 0.0 && lipschitz_g.is_finite()) {
            return Err(Error::invalid(format!("Lipschitz constant must be finite and >= 0, got {lipschitz_g}")));
        }
        if !(strong_mu >= 0.0 && strong_mu.is_finite()) {
            return Err(Error::invalid(format!("strong convexity must be finite and >= 0, got {strong_mu}")));
        }
        Ok(LossFamily {
            loss,
            offsets: Vec::new(),
            lipschitz_g,
            strong_mu,
            data_lipschitz: lipschitz_g,
            data_strong_mu: strong_mu,
        })
    }

    /// Hinge loss on features with ‖x‖₂ ≤ `feature_bound`, so G = feature_bound.
    pub fn hinge(feature_bound: f64) -> Result<Self> {
        LossFamily::new(Loss::Hinge, feature_bound, 0.0)
    }

    pub fn linear(feature_bound: f64) -> Result<Self> {
        LossFamily::new(Loss::Linear, feature_bound, 0.0)
    }

    pub fn distance() -> Self {
        LossFamily::new(Loss::Distance, 1.0, 0.0).expect("constants are valid")
    }

    /// ½‖ω − x‖² with G = sup over K_r and the data of ‖ω − x‖.
    pub fn half_squared(domain: &Domain, data: DataView<'_>) -> Self {
        let g = data.iter().map(|s| domain.max_distance_from(s.x)).fold(0.0, f64::max);
        LossFamily::new(Loss::HalfSquared, g, 1.0).expect("finite data gives finite G")
    }

    /// Lipschitz constant of the data-dependent term alone; this is the
    /// privacy sensitivity of a summed subgradient.
    pub fn data_lipschitz(&self) -> f64 {
        self.data_lipschitz
    }

    pub fn data_strong_mu(&self) -> f64 {
        self.data_strong_mu
    }

    pub fn data_family(&self) -> LossFamily {
        LossFamily {
            loss: self.loss,
            offsets: Vec::new(),
            lipschitz_g: self.data_lipschitz,
            strong_mu: self.data_strong_mu,
            data_lipschitz: self.data_lipschitz,
            data_strong_mu: self.data_strong_mu,
        }
    }

    /// All offsets folded into one composite term (zero if none).
    pub fn composite(&self, dim: usize) -> QuadraticOffset {
        QuadraticOffset::combine(&self.offsets, dim)
    }

    #[inline]
    pub fn value(&self, w: &[f64], s: SampleRef<'_>) -> f64 {
        self.loss.value(w, s) + self.offset_value(w)
    }

    pub fn offset_value(&self, w: &[f64]) -> f64 {
        self.offsets.iter().map(|o| o.value(w)).sum()
    }

    pub fn subgrad(&self, w: &[f64], s: SampleRef<'_>) -> Vec<f64> {
        let mut g = vec![0.0; w.len()];
        self.loss.accumulate_subgrad(w, s, 1.0, &mut g);
        for o in &self.offsets {
            o.accumulate_grad(w, &mut g);
        }
        g
    }

    /// F̂(ω): average loss over the samples, offsets included.
    pub fn empirical_value(&self, w: &[f64], data: DataView<'_>) -> f64 {
        let n = data.len() as f64;
        data.iter().map(|s| self.loss.value(w, s)).sum::<f64>() / n + self.offset_value(w)
    }

    pub fn empirical_subgrad(&self, w: &[f64], data: DataView<'_>) -> Vec<f64> {
        let mut g = vec![0.0; w.len()];
        let k = 1.0 / data.len() as f64;
        for s in data.iter() {
            self.loss.accumulate_subgrad(w, s, k, &mut g);
        }
        for o in &self.offsets {
            o.accumulate_grad(w, &mut g);
        }
        g
    }
}

/// Adds `offset` to every per-sample loss. μ grows by 2λ and G by 2λ times the
/// largest distance from the offset center over K_r.
pub fn regularize(family: &LossFamily, offset: &QuadraticOffset, domain: &Domain) -> Result<LossFamily> {
    linalg::check_dim(domain.dim(), offset.center.len())?;
    let offset = QuadraticOffset::new(offset.coeff_lambda, offset.center.clone())?;
    if offset.is_zero() {
        return Ok(family.clone());
    }
    let mut out = family.clone();
    out.strong_mu += offset.strong_convexity();
    out.lipschitz_g += 2.0 * offset.coeff_lambda * domain.max_distance_from(&offset.center);
    out.offsets.push(offset);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Dataset;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_sphere(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = linalg::norm(&v);
        v.into_iter().map(|x| x / n).collect()
    }

    #[test]
    fn hinge_active_at_zero_margin() {
        let (g, v) = hinge_loss_subgrad(&[0.0, 0.0], &[1.0, 1.0], 1.0).unwrap();
        assert_eq!(g, vec![-1.0, -1.0]);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn hinge_inactive_beyond_margin() {
        let (g, v) = hinge_loss_subgrad(&[1.0, 1.0], &[1.0, 1.0], 1.0).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn hinge_dimension_mismatch() {
        assert!(matches!(hinge_loss_subgrad(&[0.0], &[1.0, 1.0], 1.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn hinge_subgrad_norm_on_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let w: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
            let x = unit_sphere(&mut rng, 5);
            let y = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let (g, _) = hinge_loss_subgrad(&w, &x, y).unwrap();
            assert!(linalg::norm(&g) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn zero_offset_is_identity() {
        let k = Domain::centered_ball(2, 1.0).unwrap();
        let f = LossFamily::hinge(1.0).unwrap();
        let g = regularize(&f, &QuadraticOffset::zero(2), &k).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn offset_adds_value_and_gradient() {
        let k = Domain::centered_ball(2, 2.0).unwrap();
        let f = LossFamily::hinge(1.0).unwrap();
        let reg = regularize(&f, &QuadraticOffset::new(0.5, vec![0.0, 0.0]).unwrap(), &k).unwrap();
        let s = SampleRef { x: &[0.0, 1.0], y: 1.0 };
        let w = [1.0, 0.0];
        assert_abs_diff_eq!(reg.value(&w, s) - f.value(&w, s), 0.5, epsilon = 1e-15);
        let dg = linalg::sub(&reg.subgrad(&w, s), &f.subgrad(&w, s));
        assert_eq!(dg, vec![1.0, 0.0]);
        assert_abs_diff_eq!(reg.strong_mu, 1.0);
        assert_abs_diff_eq!(reg.lipschitz_g, 1.0 + 2.0 * 0.5 * 2.0);
        assert_eq!(reg.data_lipschitz(), 1.0);
    }

    #[test]
    fn offset_vanishes_at_its_center() {
        let k = Domain::centered_ball(3, 1.0).unwrap();
        let f = LossFamily::distance();
        let c = vec![0.1, -0.2, 0.3];
        let reg = regularize(&f, &QuadraticOffset::new(7.0, c.clone()).unwrap(), &k).unwrap();
        let s = SampleRef { x: &[0.5, 0.5, 0.5], y: 1.0 };
        assert_eq!(reg.value(&c, s), f.value(&c, s));
    }

    #[test]
    fn combined_offsets_share_gradient() {
        let a = QuadraticOffset::new(0.3, vec![1.0, 0.0]).unwrap();
        let b = QuadraticOffset::new(0.7, vec![0.0, 2.0]).unwrap();
        let c = QuadraticOffset::combine(&[a.clone(), b.clone()], 2);
        let w = [0.4, -0.9];
        let mut g1 = vec![0.0; 2];
        a.accumulate_grad(&w, &mut g1);
        b.accumulate_grad(&w, &mut g1);
        let mut g2 = vec![0.0; 2];
        c.accumulate_grad(&w, &mut g2);
        assert_abs_diff_eq!(g1[0], g2[0], epsilon = 1e-14);
        assert_abs_diff_eq!(g1[1], g2[1], epsilon = 1e-14);
    }

    /// Lipschitz, subgradient-norm, convexity and strong-convexity checks on
    /// random pairs inside K_r for every family kind.
    #[test]
    fn family_invariants_hold_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = 4;
        let k = Domain::centered_ball(d, 1.0).unwrap().with_expansion(0.2).unwrap();
        let data = Dataset::from_samples((0..20).map(|i| {
            let x = unit_sphere(&mut ChaCha8Rng::seed_from_u64(100 + i), d);
            (x, if i % 3 == 0 { -1.0 } else { 1.0 })
        }))
        .unwrap();
        let hinge = LossFamily::hinge(1.0).unwrap();
        let offset = QuadraticOffset::new(0.4, vec![0.1, 0.0, -0.1, 0.0]).unwrap();
        let families = vec![
            hinge.clone(),
            LossFamily::distance(),
            LossFamily::half_squared(&k, data.view()),
            LossFamily::linear(1.0).unwrap(),
            regularize(&hinge, &offset, &k).unwrap(),
        ];
        let kr_radius = 1.2;
        let draw = |rng: &mut ChaCha8Rng| {
            let dir = unit_sphere(rng, d);
            let rad = kr_radius * rng.random::<f64>().powf(1.0 / d as f64);
            dir.into_iter().map(|v| v * rad).collect::<Vec<_>>()
        };
        for fam in &families {
            for _ in 0..10_000 {
                let u = draw(&mut rng);
                let v = draw(&mut rng);
                let s = data.sample(rng.random_range(0..data.len()));
                let g = fam.subgrad(&u, s);
                assert!(linalg::norm(&g) <= fam.lipschitz_g + 1e-12, "{:?}", fam.loss);
                let (fu, fv) = (fam.value(&u, s), fam.value(&v, s));
                assert!((fu - fv).abs() <= fam.lipschitz_g * linalg::dist(&u, &v) + 1e-12);
                let lin = fu + linalg::dot(&g, &linalg::sub(&v, &u));
                let quad = 0.5 * fam.strong_mu * linalg::dist_sq(&u, &v);
                assert!(fv >= lin + quad - 1e-10, "{:?}: {fv} < {} ", fam.loss, lin + quad);
            }
        }
    }
}
