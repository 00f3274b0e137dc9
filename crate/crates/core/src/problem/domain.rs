use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Base feasible set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl Shape {
    fn dim(&self) -> usize {
        match self {
            Shape::Ball { center, .. } => center.len(),
            Shape::Box { lower, .. } => lower.len(),
        }
    }

    fn project_in_place(&self, p: &mut [f64]) {
        match self {
            Shape::Ball { center, radius } => project_ball(center, *radius, p),
            Shape::Box { lower, upper } => {
                for ((v, lo), hi) in p.iter_mut().zip(lower).zip(upper) {
                    *v = v.clamp(*lo, *hi);
                }
            }
        }
    }

    fn contains(&self, p: &[f64], tol: f64) -> bool {
        match self {
            Shape::Ball { center, radius } => linalg::dist(p, center) <= radius + tol,
            Shape::Box { lower, upper } => {
                p.iter().zip(lower).zip(upper).all(|((v, lo), hi)| *v >= lo - tol && *v <= hi + tol)
            }
        }
    }

    fn diameter(&self) -> f64 {
        match self {
            Shape::Ball { radius, .. } => 2.0 * radius,
            Shape::Box { lower, upper } => linalg::dist(lower, upper),
        }
    }

    fn max_distance_from(&self, c: &[f64]) -> f64 {
        match self {
            Shape::Ball { center, radius } => linalg::dist(c, center) + radius,
            Shape::Box { lower, upper } => c
                .iter()
                .zip(lower)
                .zip(upper)
                .map(|((ci, lo), hi)| {
                    let m = (ci - lo).abs().max((ci - hi).abs());
                    m * m
                })
                .sum::<f64>()
                .sqrt(),
        }
    }

    fn center(&self) -> Vec<f64> {
        match self {
            Shape::Ball { center, .. } => center.clone(),
            Shape::Box { lower, upper } => lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect(),
        }
    }
}

#[inline]
fn project_ball(center: &[f64], radius: f64, p: &mut [f64]) {
    let d = linalg::dist(p, center);
    if d > radius {
        let s = radius / d;
        for (v, c) in p.iter_mut().zip(center) {
            *v = c + (*v - c) * s;
        }
    }
}

/// The convex set K, optionally intersected with a localization ball, plus
/// the expansion radius r of the set K_r on which losses must be defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    shape: Shape,
    restriction: Option<(Vec<f64>, f64)>,
    expansion_r: f64,
}

const DYKSTRA_TOL: f64 = 1e-10;
const DYKSTRA_MAX_ITERS: usize = 10_000;

impl Domain {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::invalid("domain dimension must be at least 1"));
        }
        linalg::check_finite(&center)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("ball radius must be positive and finite, got {radius}")));
        }
        Ok(Domain { shape: Shape::Ball { center, radius }, restriction: None, expansion_r: 0.0 })
    }

    pub fn centered_ball(dim: usize, radius: f64) -> Result<Self> {
        Domain::ball(vec![0.0; dim], radius)
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        linalg::check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::invalid("domain dimension must be at least 1"));
        }
        linalg::check_finite(&lower)?;
        linalg::check_finite(&upper)?;
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::invalid("box lower bound exceeds upper bound"));
        }
        Ok(Domain { shape: Shape::Box { lower, upper }, restriction: None, expansion_r: 0.0 })
    }

    pub fn with_expansion(mut self, r: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("expansion radius must be finite and >= 0, got {r}")));
        }
        self.expansion_r = r;
        Ok(self)
    }

    /// K ∩ ball(center, radius), keeping the same base set and expansion.
    pub fn localized(&self, center: &[f64], radius: f64) -> Result<Self> {
        linalg::check_dim(self.dim(), center.len())?;
        linalg::check_finite(center)?;
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("localization radius must be finite and >= 0, got {radius}")));
        }
        Ok(Domain { shape: self.shape.clone(), restriction: Some((center.to_vec(), radius)), expansion_r: self.expansion_r })
    }

    /// The same set without any localization ball.
    pub fn base(&self) -> Domain {
        Domain { shape: self.shape.clone(), restriction: None, expansion_r: self.expansion_r }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn restriction(&self) -> Option<(&[f64], f64)> {
        self.restriction.as_ref().map(|(c, r)| (c.as_slice(), *r))
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn expansion_r(&self) -> f64 {
        self.expansion_r
    }

    pub fn center(&self) -> Vec<f64> {
        self.shape.center()
    }

    /// Diameter D. Exact for balls and boxes; for a localized set this is the
    /// smaller of the two diameters, an upper bound.
    pub fn diameter(&self) -> f64 {
        let base = self.shape.diameter();
        match &self.restriction {
            Some((_, r)) => base.min(2.0 * r),
            None => base,
        }
    }

    /// sup over w in K_r of ‖w − c‖.
    pub fn max_distance_from(&self, c: &[f64]) -> f64 {
        let base = self.shape.max_distance_from(c);
        let within = match &self.restriction {
            Some((lc, r)) => base.min(linalg::dist(c, lc) + r),
            None => base,
        };
        within + self.expansion_r
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        p.len() == self.dim()
            && self.shape.contains(p, tol)
            && self.restriction.as_ref().is_none_or(|(c, r)| linalg::dist(p, c) <= r + tol)
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, p: &[f64]) -> Result<Vec<f64>> {
        linalg::check_dim(self.dim(), p.len())?;
        linalg::check_finite(p)?;
        let mut out = p.to_vec();
        self.project_in_place(&mut out);
        Ok(out)
    }

    /// Unchecked projection used on hot paths; `p` must have the domain's
    /// dimension and finite entries.
    pub fn project_in_place(&self, p: &mut [f64]) {
        match &self.restriction {
            None => self.shape.project_in_place(p),
            Some((c, r)) => self.project_intersection(c, *r, p),
        }
    }

    fn project_intersection(&self, c: &[f64], r: f64, p: &mut [f64]) {
        let mut a = p.to_vec();
        project_ball(c, r, &mut a);
        if self.shape.contains(&a, 0.0) {
            p.copy_from_slice(&a);
            return;
        }
        let mut b = p.to_vec();
        self.shape.project_in_place(&mut b);
        if linalg::dist(&b, c) <= r {
            p.copy_from_slice(&b);
            return;
        }
        // Dykstra alternation: ball first, then K.
        let d = p.len();
        let mut y = p.to_vec();
        let mut inc_ball = vec![0.0; d];
        let mut inc_base = vec![0.0; d];
        let mut prev = y.clone();
        for _ in 0..DYKSTRA_MAX_ITERS {
            for i in 0..d {
                a[i] = y[i] + inc_ball[i];
            }
            project_ball(c, r, &mut a);
            for i in 0..d {
                inc_ball[i] = y[i] + inc_ball[i] - a[i];
                b[i] = a[i] + inc_base[i];
            }
            self.shape.project_in_place(&mut b);
            for i in 0..d {
                inc_base[i] = a[i] + inc_base[i] - b[i];
            }
            y.copy_from_slice(&b);
            if linalg::dist(&y, &prev) <= DYKSTRA_TOL && linalg::dist(&a, &b) <= DYKSTRA_TOL {
                break;
            }
            prev.copy_from_slice(&y);
        }
        // Land exactly inside the ball; y already lies in K.
        project_ball(c, r, &mut y);
        p.copy_from_slice(&y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn ball_projection_scales_to_boundary() {
        let k = Domain::centered_ball(2, 1.0).unwrap();
        let p = k.project(&[3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(p[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn interior_point_is_fixed() {
        let k = Domain::centered_ball(2, 1.0).unwrap();
        assert_eq!(k.project(&[0.1, -0.2]).unwrap(), vec![0.1, -0.2]);
    }

    #[test]
    fn box_clamps() {
        let k = Domain::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(k.project(&[2.0, -0.5]).unwrap(), vec![1.0, -0.5]);
        assert_abs_diff_eq!(k.diameter(), 8f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn rejects_non_finite_and_wrong_dim() {
        let k = Domain::centered_ball(2, 1.0).unwrap();
        assert!(matches!(k.project(&[f64::NAN, 0.0]), Err(Error::InvalidInput(_))));
        assert!(matches!(k.project(&[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn localized_box_matches_brute_force() {
        // Intersection of the unit square with a ball poking out of a corner.
        let k = Domain::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let loc = k.localized(&[0.9, 0.9], 0.5).unwrap();
        let p = [2.0, 0.2];
        let got = loc.project(&p).unwrap();
        assert!(loc.contains(&got, 1e-9));
        let mut best = f64::INFINITY;
        let n = 2000;
        for i in 0..=n {
            for j in 0..=n {
                let q = [i as f64 / n as f64, j as f64 / n as f64];
                if loc.contains(&q, 0.0) {
                    best = best.min(linalg::dist(&q, &p));
                }
            }
        }
        assert!(linalg::dist(&got, &p) <= best + 1e-6, "{} vs {best}", linalg::dist(&got, &p));
    }

    #[test]
    fn max_distance_covers_expansion() {
        let k = Domain::centered_ball(3, 2.0).unwrap().with_expansion(0.5).unwrap();
        assert_abs_diff_eq!(k.max_distance_from(&[1.0, 0.0, 0.0]), 3.5, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn projection_is_optimal_and_idempotent(
            p in prop::collection::vec(-5.0f64..5.0, 3),
            qs in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 100),
            use_box in any::<bool>(),
        ) {
            let k = if use_box {
                Domain::boxed(vec![-1.0, -0.5, 0.0], vec![1.0, 0.5, 2.0]).unwrap()
            } else {
                Domain::ball(vec![0.2, 0.0, -0.1], 1.3).unwrap()
            };
            let proj = k.project(&p).unwrap();
            prop_assert!(k.contains(&proj, 1e-12));
            prop_assert!(linalg::dist(&k.project(&proj).unwrap(), &proj) <= 1e-12);
            let dp = linalg::dist(&proj, &p);
            for q in qs {
                let q = k.project(&q).unwrap();
                prop_assert!(dp <= linalg::dist(&q, &p) + 1e-12);
            }
        }

        #[test]
        fn localized_projection_lands_in_both_sets(
            p in prop::collection::vec(-4.0f64..4.0, 2),
            c in prop::collection::vec(-1.0f64..1.0, 2),
            r in 0.05f64..2.0,
        ) {
            let k = Domain::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
            let loc = k.localized(&c, r).unwrap();
            let proj = loc.project(&p).unwrap();
            prop_assert!(loc.contains(&proj, 1e-8));
        }
    }
}
