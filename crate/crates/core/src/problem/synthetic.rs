//! Seeded synthetic tasks with known Lipschitz constants.

use rand::Rng;
use rand_distr::StandardNormal;

use super::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg;
use crate::sampling::{self, RandomStream};

/// A halfspace classification task: features uniform on the sphere of radius
/// `feature_norm`, labels sign⟨w*, x⟩ flipped independently with probability
/// `flip_prob`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedHalfspace {
    pub dim: usize,
    pub feature_norm: f64,
    pub flip_prob: f64,
    pub w_star: Vec<f64>,
}

impl PlantedHalfspace {
    pub fn new(dim: usize, feature_norm: f64, flip_prob: f64, rng: &mut RandomStream) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if !(feature_norm > 0.0 && feature_norm.is_finite()) {
            return Err(Error::invalid(format!("feature norm must be positive, got {feature_norm}")));
        }
        if !(0.0..=0.5).contains(&flip_prob) {
            return Err(Error::invalid(format!("flip probability must lie in [0, 1/2], got {flip_prob}")));
        }
        let w_star = sphere_point(dim, 1.0, rng);
        Ok(PlantedHalfspace { dim, feature_norm, flip_prob, w_star })
    }

    pub fn sample(&self, n: usize, rng: &mut RandomStream) -> Result<Dataset> {
        let mut features = Vec::with_capacity(n * self.dim);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let x = sphere_point(self.dim, self.feature_norm, rng);
            let mut y = if linalg::dot(&x, &self.w_star) >= 0.0 { 1.0 } else { -1.0 };
            if self.flip_prob > 0.0 && rng.random_bool(self.flip_prob) {
                y = -y;
            }
            features.extend_from_slice(&x);
            labels.push(y);
        }
        Dataset::new(self.dim, features, labels)
    }
}

/// Samples x ~ N(mean, std² I), all labels 1, for the ½‖ω − x‖² task.
pub fn gaussian_cloud(n: usize, mean: &[f64], std: f64, rng: &mut RandomStream) -> Result<Dataset> {
    if !(std >= 0.0 && std.is_finite()) {
        return Err(Error::invalid(format!("std must be finite and >= 0, got {std}")));
    }
    let d = mean.len();
    let mut features = Vec::with_capacity(n * d);
    for _ in 0..n {
        for m in mean {
            let z: f64 = rng.sample(StandardNormal);
            features.push(m + std * z);
        }
    }
    Dataset::new(d, features, vec![1.0; n])
}

/// A uniform point on the sphere of the given radius.
pub fn sphere_point(dim: usize, radius: f64, rng: &mut RandomStream) -> Vec<f64> {
    loop {
        let v = sampling::gaussian_vector(dim, 1.0, rng).expect("dim >= 1");
        let n = linalg::norm(&v);
        if n > 0.0 {
            return v.into_iter().map(|x| radius * x / n).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_features_have_exact_norm() {
        let mut rng = RandomStream::new(3, 5);
        let task = PlantedHalfspace::new(8, 1.0, 0.1, &mut rng).unwrap();
        let data = task.sample(500, &mut rng).unwrap();
        assert_eq!(data.len(), 500);
        assert!((data.max_feature_norm() - 1.0).abs() < 1e-12);
        let flipped = data
            .view()
            .iter()
            .filter(|s| (linalg::dot(s.x, &task.w_star) >= 0.0) != (s.y > 0.0))
            .count();
        assert!((20..=80).contains(&flipped), "{flipped} flips");
    }

    #[test]
    fn noiseless_labels_are_separable() {
        let mut rng = RandomStream::new(4, 5);
        let task = PlantedHalfspace::new(3, 1.0, 0.0, &mut rng).unwrap();
        let data = task.sample(100, &mut rng).unwrap();
        assert!(data.view().iter().all(|s| s.y * linalg::dot(s.x, &task.w_star) >= 0.0));
    }
}
