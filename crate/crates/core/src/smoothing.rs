//! Ball-convolution smoothing and the noisy minibatch oracle built on it.
//!
//! For radius r the smoothed empirical loss is
//! F̂_r(ω) = (1/N) Σᵢ E_{‖y‖≤r} f(ω + y, xᵢ). One oracle call draws a single y
//! shared by the whole batch, a fresh size-B subset S and v ~ N(0, σ²I), and
//! returns (Σ_{i∈S} ∂f(ω + y, xᵢ) + v) / B.

use rand::Rng;

use crate::acsa::StochasticOracle;
use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{DataView, Domain, LossFamily};
use crate::sampling::{self, Streams, Subsampler};

const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct SmoothedOracleConfig<'a> {
    pub radius_r: f64,
    pub batch_b: usize,
    pub noise_sigma: f64,
    pub data: DataView<'a>,
    /// Only the data-dependent loss is queried; quadratic offsets are ignored.
    pub family: &'a LossFamily,
    pub domain: &'a Domain,
}

impl SmoothedOracleConfig<'_> {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius_r >= 0.0 && self.radius_r.is_finite()) {
            return Err(Error::Config(format!("radius must be finite and >= 0, got {}", self.radius_r)));
        }
        if self.radius_r > self.domain.expansion_r() * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "radius {} exceeds domain expansion {}",
                self.radius_r,
                self.domain.expansion_r()
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::Config(format!("noise sigma must be finite and >= 0, got {}", self.noise_sigma)));
        }
        if self.batch_b == 0 || self.batch_b > self.data.len() {
            return Err(Error::Config(format!("batch {} must lie in [1, {}]", self.batch_b, self.data.len())));
        }
        linalg::check_dim(self.domain.dim(), self.data.dim())
    }
}

/// Stateful oracle owning its random streams and subset buffer.
pub struct SmoothedOracle<'a> {
    cfg: SmoothedOracleConfig<'a>,
    streams: Streams,
    subsampler: Subsampler,
    shifted: Vec<f64>,
}

impl<'a> SmoothedOracle<'a> {
    pub fn new(cfg: SmoothedOracleConfig<'a>, streams: Streams) -> Result<Self> {
        cfg.validate()?;
        Ok(SmoothedOracle {
            subsampler: Subsampler::new(cfg.data.len(), cfg.batch_b)?,
            shifted: vec![0.0; cfg.domain.dim()],
            cfg,
            streams,
        })
    }

    pub fn config(&self) -> &SmoothedOracleConfig<'a> {
        &self.cfg
    }

    pub fn into_streams(self) -> Streams {
        self.streams
    }
}

impl StochasticOracle for SmoothedOracle<'_> {
    fn batch_size(&self) -> u64 {
        self.cfg.batch_b as u64
    }

    fn dim(&self) -> usize {
        self.cfg.domain.dim()
    }

    fn query(&mut self, point: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.dim();
        linalg::check_dim(d, point.len())?;
        linalg::check_dim(d, out.len())?;
        if !self.cfg.domain.contains(point, MEMBERSHIP_TOL) {
            return Err(Error::precondition("omega in K"));
        }
        sampling::fill_uniform_ball(self.cfg.radius_r, &mut self.shifted, &mut self.streams.smoothing);
        for (s, p) in self.shifted.iter_mut().zip(point) {
            *s += p;
        }
        out.fill(0.0);
        let loss = self.cfg.family.loss;
        for &i in self.subsampler.draw(&mut self.streams.subsample) {
            loss.accumulate_subgrad(&self.shifted, self.cfg.data.sample(i), 1.0, out);
        }
        sampling::add_gaussian(self.cfg.noise_sigma, out, &mut self.streams.noise);
        linalg::scale(1.0 / self.cfg.batch_b as f64, out);
        Ok(())
    }
}

/// One oracle draw with a freshly built subset buffer.
pub fn smoothed_stochastic_subgrad(cfg: &SmoothedOracleConfig<'_>, omega: &[f64], streams: &mut Streams) -> Result<Vec<f64>> {
    let mut oracle = SmoothedOracle::new(*cfg, streams.clone())?;
    let mut out = vec![0.0; omega.len()];
    oracle.query(omega, &mut out)?;
    *streams = oracle.into_streams();
    Ok(out)
}

/// Monte-Carlo estimate of F̂_r(ω) over `n_mc` ball draws, each averaged over
/// the full dataset, with its standard error. Quadratic offsets of the family
/// are smoothed as well.
pub fn mc_smoothed_value<R: Rng + ?Sized>(
    cfg: &SmoothedOracleConfig<'_>,
    omega: &[f64],
    n_mc: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if n_mc < 2 {
        return Err(Error::invalid(format!("need at least 2 Monte-Carlo draws, got {n_mc}")));
    }
    cfg.validate()?;
    linalg::check_dim(cfg.domain.dim(), omega.len())?;
    if cfg.radius_r == 0.0 {
        return Ok((cfg.family.empirical_value(omega, cfg.data), 0.0));
    }
    let mut w = vec![0.0; omega.len()];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n_mc {
        sampling::fill_uniform_ball(cfg.radius_r, &mut w, rng);
        linalg::axpy(1.0, omega, &mut w);
        let v = cfg.family.empirical_value(&w, cfg.data);
        sum += v;
        sum_sq += v * v;
    }
    let n = n_mc as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// Reference estimate of ∇F̂_r(ω) from `n_draws` independent (y, i) pairs.
pub fn mc_smoothed_gradient<R: Rng + ?Sized>(
    family: &LossFamily,
    data: DataView<'_>,
    radius_r: f64,
    omega: &[f64],
    n_draws: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if n_draws == 0 {
        return Err(Error::invalid("need at least one draw"));
    }
    linalg::check_dim(data.dim(), omega.len())?;
    let mut w = vec![0.0; omega.len()];
    let mut g = vec![0.0; omega.len()];
    for _ in 0..n_draws {
        sampling::fill_uniform_ball(radius_r, &mut w, rng);
        linalg::axpy(1.0, omega, &mut w);
        let i = rng.random_range(0..data.len());
        family.loss.accumulate_subgrad(&w, data.sample(i), 1.0, &mut g);
    }
    linalg::scale(1.0 / n_draws as f64, &mut g);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::synthetic::PlantedHalfspace;
    use crate::problem::{Dataset, Loss};
    use crate::sampling::RandomStream;
    use approx::assert_abs_diff_eq;

    fn abs_setup() -> (LossFamily, Dataset, Domain) {
        // f(ω, x) = |ω − x| with the single sample x = 0.
        let family = LossFamily::distance();
        let data = Dataset::new(1, vec![0.0], vec![1.0]).unwrap();
        let domain = Domain::centered_ball(1, 1.0).unwrap().with_expansion(0.1).unwrap();
        (family, data, domain)
    }

    fn cfg<'a>(family: &'a LossFamily, data: &'a Dataset, domain: &'a Domain, r: f64, b: usize, sigma: f64) -> SmoothedOracleConfig<'a> {
        SmoothedOracleConfig { radius_r: r, batch_b: b, noise_sigma: sigma, data: data.view(), family, domain }
    }

    fn hinge_setup(n: usize, d: usize, seed: u64) -> (LossFamily, Dataset, Domain) {
        let mut rng = RandomStream::new(seed, 5);
        let task = PlantedHalfspace::new(d, 1.0, 0.1, &mut rng).unwrap();
        let data = task.sample(n, &mut rng).unwrap();
        (LossFamily::hinge(1.0).unwrap(), data, Domain::centered_ball(d, 1.0).unwrap().with_expansion(0.2).unwrap())
    }

    #[test]
    fn degenerate_oracle_is_full_subgradient() {
        let (family, data, domain) = hinge_setup(64, 5, 1);
        let c = cfg(&family, &data, &domain, 0.0, 64, 0.0);
        let w = vec![0.1, -0.2, 0.3, 0.0, 0.05];
        let g = smoothed_stochastic_subgrad(&c, &w, &mut Streams::new(3)).unwrap();
        let exact = family.empirical_subgrad(&w, data.view());
        for (a, b) in g.iter().zip(&exact) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn config_validation() {
        let (family, data, domain) = hinge_setup(10, 2, 2);
        assert!(cfg(&family, &data, &domain, 0.3, 5, 0.0).validate().is_err());
        assert!(cfg(&family, &data, &domain, 0.1, 11, 0.0).validate().is_err());
        assert!(cfg(&family, &data, &domain, 0.1, 0, 0.0).validate().is_err());
        assert!(cfg(&family, &data, &domain, 0.1, 10, -1.0).validate().is_err());
        assert!(cfg(&family, &data, &domain, 0.2, 10, 1.0).validate().is_ok());
    }

    #[test]
    fn rejects_point_outside_domain() {
        let (family, data, domain) = hinge_setup(10, 2, 2);
        let c = cfg(&family, &data, &domain, 0.1, 4, 0.0);
        let e = smoothed_stochastic_subgrad(&c, &[2.0, 0.0], &mut Streams::new(0)).unwrap_err();
        assert!(matches!(e, Error::Precondition { .. }));
    }

    fn mean_oracle_1d(omega: f64, calls: usize) -> f64 {
        let (family, data, domain) = abs_setup();
        let mut oracle = SmoothedOracle::new(cfg(&family, &data, &domain, 0.1, 1, 0.0), Streams::new(11)).unwrap();
        let mut out = [0.0];
        let mut s = 0.0;
        for _ in 0..calls {
            oracle.query(&[omega], &mut out).unwrap();
            s += out[0];
        }
        s / calls as f64
    }

    #[test]
    fn abs_smoothed_derivative_at_center() {
        let m = mean_oracle_1d(0.0, 100_000);
        assert!(m.abs() <= 0.01, "{m}");
    }

    #[test]
    fn abs_smoothed_derivative_inside_kink() {
        let m = mean_oracle_1d(0.05, 100_000);
        assert!((m - 0.5).abs() <= 0.01, "{m}");
    }

    #[test]
    fn mc_value_unsmoothed_is_exact() {
        let (family, data, domain) = hinge_setup(50, 3, 3);
        let w = vec![0.2, 0.1, -0.4];
        let (v, se) = mc_smoothed_value(&cfg(&family, &data, &domain, 0.0, 1, 0.0), &w, 2, &mut RandomStream::new(0, 6)).unwrap();
        assert_eq!(v, family.empirical_value(&w, data.view()));
        assert_eq!(se, 0.0);
        assert!(mc_smoothed_value(&cfg(&family, &data, &domain, 0.0, 1, 0.0), &w, 1, &mut RandomStream::new(0, 6)).is_err());
    }

    #[test]
    fn mc_value_abs_at_zero() {
        let (family, data, domain) = abs_setup();
        let (v, se) = mc_smoothed_value(&cfg(&family, &data, &domain, 0.1, 1, 0.0), &[0.0], 20_000, &mut RandomStream::new(1, 6)).unwrap();
        assert!((v - 0.05).abs() <= 3.0 * se, "{v} ± {se}");
    }

    #[test]
    fn sandwich_on_hinge_task() {
        let (family, data, domain) = hinge_setup(256, 8, 4);
        let c = cfg(&family, &data, &domain, 0.2, 1, 0.0);
        let mut rng = RandomStream::new(4, 6);
        for _ in 0..50 {
            let w = domain.project(&sampling::gaussian_vector(8, 0.5, &mut rng).unwrap()).unwrap();
            let f = family.empirical_value(&w, data.view());
            let (v, se) = mc_smoothed_value(&c, &w, 400, &mut rng).unwrap();
            assert!(v >= f - 3.0 * se - 1e-12, "{v} < {f}");
            assert!(v <= f + family.lipschitz_g * 0.2 + 3.0 * se + 1e-12);
        }
    }

    #[test]
    fn variance_bound() {
        let (n, d) = (200, 6);
        let (family, data, domain) = hinge_setup(n, d, 5);
        let (r, b, sigma) = (0.2, 8, 0.5);
        let w = vec![0.1; d];
        let mut rng = RandomStream::new(5, 6);
        let reference = mc_smoothed_gradient(&family, data.view(), r, &w, 1_000_000, &mut rng).unwrap();
        let mut oracle = SmoothedOracle::new(cfg(&family, &data, &domain, r, b, sigma), Streams::new(6)).unwrap();
        let calls = 20_000;
        let mut out = vec![0.0; d];
        let mut acc = 0.0;
        for _ in 0..calls {
            oracle.query(&w, &mut out).unwrap();
            acc += linalg::dist_sq(&out, &reference);
        }
        let emp = acc / calls as f64;
        let g = family.lipschitz_g;
        let bound = g * g / b as f64 + sigma * sigma * d as f64 / (b * b) as f64;
        assert!(emp <= 1.1 * bound, "{emp} > 1.1 * {bound}");
    }

    /// Closed-form smoothed |ω| in 1-d.
    fn smoothed_abs(w: f64, r: f64) -> f64 {
        if w.abs() >= r {
            w.abs()
        } else {
            (w * w + r * r) / (2.0 * r)
        }
    }

    #[test]
    fn analytic_smoothed_abs_matches_mc() {
        let (family, data, domain) = abs_setup();
        let c = cfg(&family, &data, &domain, 0.1, 1, 0.0);
        let mut rng = RandomStream::new(8, 6);
        for &w in &[-0.3, -0.07, 0.0, 0.02, 0.099, 0.5] {
            let (v, se) = mc_smoothed_value(&c, &[w], 20_000, &mut rng).unwrap();
            assert!((v - smoothed_abs(w, 0.1)).abs() <= 3.0 * se + 1e-12, "ω={w}: {v} vs {}", smoothed_abs(w, 0.1));
        }
    }

    #[test]
    fn smoothness_witness_1d() {
        let r = 0.1;
        let h = 1e-4;
        let deriv = |w: f64| (smoothed_abs(w + h, r) - smoothed_abs(w - h, r)) / (2.0 * h);
        let mut w = -0.5;
        while w < 0.5 {
            let slope = (deriv(w + h) - deriv(w - h)) / (2.0 * h);
            assert!(slope <= 1.0 / r + 1e-6, "{w}: {slope}");
            if w.abs() < r - 3.0 * h {
                assert!((slope - 1.0 / r).abs() <= 1e-6 * (1.0 / r) + 1e-4, "{w}: {slope}");
            }
            w += 0.0037;
        }
    }

    #[test]
    fn strong_convexity_preserved() {
        // ½‖ω − x‖² smoothed is ½‖ω − x‖² + const; the first-order check
        // F(v) ≥ F(w) + ⟨∇F(w), v − w⟩ + (μ/2)‖v − w‖² must hold with μ = 1.
        let d = 3;
        let data = Dataset::new(d, vec![0.1, 0.2, -0.3, 0.0, 0.5, 0.1], vec![1.0, 1.0]).unwrap();
        let domain = Domain::centered_ball(d, 1.0).unwrap().with_expansion(0.2).unwrap();
        let family = LossFamily::half_squared(&domain, data.view());
        assert_eq!(family.loss, Loss::HalfSquared);
        let c = cfg(&family, &data, &domain, 0.2, 2, 0.0);
        let mut rng = RandomStream::new(9, 6);
        for _ in 0..20 {
            let w = domain.project(&sampling::gaussian_vector(d, 0.6, &mut rng).unwrap()).unwrap();
            let v = domain.project(&sampling::gaussian_vector(d, 0.6, &mut rng).unwrap()).unwrap();
            let (fw, sw) = mc_smoothed_value(&c, &w, 20_000, &mut rng).unwrap();
            let (fv, sv) = mc_smoothed_value(&c, &v, 20_000, &mut rng).unwrap();
            // The smoothed gradient of a quadratic equals its unsmoothed gradient.
            let gw = family.empirical_subgrad(&w, data.view());
            let diff = linalg::sub(&v, &w);
            let rhs = fw + linalg::dot(&gw, &diff) + 0.5 * family.strong_mu * linalg::dot(&diff, &diff);
            assert!(fv >= rhs - 3.0 * (sw + sv) - 1e-9, "{fv} < {rhs}");
        }
    }
}
