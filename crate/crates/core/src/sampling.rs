//! Seeded random primitives: isotropic Gaussian vectors, uniform points in an
//! ℓ2 ball, and uniform fixed-size subsets.
//!
//! Every draw comes from a [`RandomStream`], a ChaCha8 counter-based generator
//! keyed by `(seed, stream_id)`. Each algorithmic role (noise, subsampling,
//! smoothing, data generation) owns its own stream id, so changing e.g. the
//! batch size never perturbs the noise sequence. Not suitable for
//! deployment-grade privacy: the generator is not a vetted secure sampler.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Stream ids reserved for each role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamRole {
    Noise = 1,
    Subsample = 2,
    Smoothing = 3,
    Trial = 4,
    Data = 5,
    Evaluation = 6,
}

/// A reproducible single-consumer draw sequence.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RandomStream { seed, stream_id, rng }
    }

    pub fn for_role(seed: u64, role: StreamRole) -> Self {
        RandomStream::new(seed, role as u64)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// The three streams consumed by the private solvers.
#[derive(Debug, Clone)]
pub struct Streams {
    pub noise: RandomStream,
    pub subsample: RandomStream,
    pub smoothing: RandomStream,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Streams {
            noise: RandomStream::for_role(seed, StreamRole::Noise),
            subsample: RandomStream::for_role(seed, StreamRole::Subsample),
            smoothing: RandomStream::for_role(seed, StreamRole::Smoothing),
        }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    Ok(())
}

/// d independent N(0, σ²) coordinates.
pub fn gaussian_vector<R: Rng + ?Sized>(d: usize, sigma: f64, rng: &mut R) -> Result<Vec<f64>> {
    check_dim(d)?;
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    let mut v = vec![0.0; d];
    add_gaussian(sigma, &mut v, rng);
    Ok(v)
}

/// Adds N(0, σ²) noise to each coordinate of `out`. With σ = 0 no draws are
/// consumed.
#[inline]
pub fn add_gaussian<R: Rng + ?Sized>(sigma: f64, out: &mut [f64], rng: &mut R) {
    if sigma == 0.0 {
        return;
    }
    for v in out.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *v += sigma * z;
    }
}

/// A uniform draw from {y : ‖y‖₂ ≤ r}.
pub fn uniform_ball_point<R: Rng + ?Sized>(d: usize, r: f64, rng: &mut R) -> Result<Vec<f64>> {
    check_dim(d)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("ball radius must be finite and >= 0, got {r}")));
    }
    let mut v = vec![0.0; d];
    fill_uniform_ball(r, &mut v, rng);
    Ok(v)
}

/// Gaussian direction scaled by r·U^{1/d}. Overwrites `out`; r = 0 yields the
/// zero vector without consuming draws.
#[inline]
pub fn fill_uniform_ball<R: Rng + ?Sized>(r: f64, out: &mut [f64], rng: &mut R) {
    if r == 0.0 {
        out.fill(0.0);
        return;
    }
    let d = out.len();
    let n = loop {
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let n = linalg::norm(out);
        if n > 0.0 {
            break n;
        }
    };
    let u: f64 = rng.random();
    let radius = r * u.powf(1.0 / d as f64);
    linalg::scale(radius / n, out);
}

/// A uniformly random size-`b` subset of `0..n` (0-based indices).
pub fn subsample_without_replacement<R: Rng + ?Sized>(n: usize, b: usize, rng: &mut R) -> Result<Vec<usize>> {
    let mut s = Subsampler::new(n, b)?;
    Ok(s.draw(rng).to_vec())
}

/// Partial Fisher–Yates over a persistent permutation. Each draw is uniform
/// over size-`b` subsets whatever the current permutation, so the buffer is
/// reused across calls at O(b) cost.
#[derive(Debug, Clone)]
pub struct Subsampler {
    perm: Vec<usize>,
    b: usize,
}

impl Subsampler {
    pub fn new(n: usize, b: usize) -> Result<Self> {
        if b == 0 {
            return Err(Error::invalid("subset size must be at least 1"));
        }
        if b > n {
            return Err(Error::invalid(format!("subset size {b} exceeds population {n}")));
        }
        Ok(Subsampler { perm: (0..n).collect(), b })
    }

    pub fn batch_size(&self) -> usize {
        self.b
    }

    pub fn population(&self) -> usize {
        self.perm.len()
    }

    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &[usize] {
        let n = self.perm.len();
        if self.b < n {
            for i in 0..self.b {
                let j = rng.random_range(i..n);
                self.perm.swap(i, j);
            }
        }
        &self.perm[..self.b]
    }
}
