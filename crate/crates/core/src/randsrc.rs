//! Seedable samplers for the random starting iterates.
//!
//! Every law offered here has a density, so any fixed affine hyperplane is
//! hit with probability zero. All randomness in a solve derives from one
//! 64-bit seed through [`RngState`]: the root stream draws the starting
//! iterates, and child streams keyed by `(seed, step, slot)` serve parallel
//! sections.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{norm2, Scalar};
use crate::solver::IterateSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Distribution {
    Gaussian {
        mean: f64,
        stddev: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Uniform on the unit sphere, via normalized Gaussian draws.
    Sphere,
}

impl Default for Distribution {
    fn default() -> Self {
        Distribution::Gaussian {
            mean: 0.0,
            stddev: 1.0,
        }
    }
}

impl Distribution {
    pub fn gaussian(mean: f64, stddev: f64) -> Result<Self> {
        let d = Distribution::Gaussian { mean, stddev };
        d.validate()?;
        Ok(d)
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let d = Distribution::Uniform { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Distribution::Gaussian { mean, stddev } => {
                if !(stddev > 0.0 && stddev.is_finite() && mean.is_finite()) {
                    return Err(Error::Config(format!(
                        "gaussian needs finite mean and stddev > 0, got mean={mean} stddev={stddev}"
                    )));
                }
            }
            Distribution::Uniform { lo, hi } => {
                if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                    return Err(Error::Config(format!(
                        "uniform needs finite lo < hi, got lo={lo} hi={hi}"
                    )));
                }
            }
            Distribution::Sphere => {}
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Gaussian { .. } => "gaussian",
            Distribution::Uniform { .. } => "uniform",
            Distribution::Sphere => "sphere",
        }
    }
}

/// A law together with the dimension of the vectors it produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    law: Distribution,
    dim: usize,
}

impl DistributionSpec {
    pub fn new(law: Distribution, dim: usize) -> Result<Self> {
        law.validate()?;
        if dim == 0 {
            return Err(Error::Config("sample dimension must be at least 1".into()));
        }
        Ok(Self { law, dim })
    }

    pub fn law(&self) -> Distribution {
        self.law
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Deterministic counter-based random stream.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    /// Root stream of a seed.
    pub fn new(seed: u64) -> Self {
        Self::keyed(seed, 0, 0)
    }

    /// Child stream for `(seed, step, slot)`. Steps are numbered from 1, so
    /// no child coincides with the root stream.
    pub fn child(seed: u64, step: u64, slot: u64) -> Self {
        Self::keyed(seed, step, slot)
    }

    fn keyed(seed: u64, step: u64, slot: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&step.to_le_bytes());
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(slot);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// One draw of the random vector.
pub fn sample_vector<S: Scalar>(spec: &DistributionSpec, rng: &mut RngState) -> Vec<S> {
    match spec.law {
        Distribution::Gaussian { mean, stddev } => (0..spec.dim)
            .map(|_| S::sample_gaussian(rng, mean, stddev))
            .collect(),
        Distribution::Uniform { lo, hi } => (0..spec.dim)
            .map(|_| S::sample_uniform(rng, lo, hi))
            .collect(),
        Distribution::Sphere => {
            let mut v: Vec<S> = (0..spec.dim)
                .map(|_| S::sample_gaussian(rng, 0.0, 1.0))
                .collect();
            let scale = S::from_real(norm2(&v).recip());
            v.iter_mut().for_each(|x| *x *= scale);
            v
        }
    }
}

/// `count` sequential draws from the same stream, packed as generation 0.
pub fn sample_iterates<S: Scalar>(
    spec: &DistributionSpec,
    rng: &mut RngState,
    count: usize,
) -> Result<IterateSet<S>> {
    if count < spec.dim + 1 {
        return Err(Error::Config(format!(
            "need at least n+1 = {} iterates, got {count}",
            spec.dim + 1
        )));
    }
    let vectors = (0..count).map(|_| sample_vector(spec, rng)).collect();
    Ok(IterateSet::new(spec.dim, vectors, 0))
}
