//! Seeded sampling helpers. Every random draw in the crate goes through
//! [`SampleRng`] so runs are reproducible from a single integer seed.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg;

#[derive(Clone, Debug)]
pub struct SampleRng {
    inner: ChaCha8Rng,
}

impl SampleRng {
    pub fn seeded(seed: u64) -> Self {
        SampleRng { inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream for the same seed, e.g. one per audit.
    pub fn stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        SampleRng { inner }
    }

    /// Uniform on `[lo, hi)`; returns `lo` for an empty interval.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return lo;
        }
        lo + (hi - lo) * self.inner.random::<f64>()
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.inner.random_range(0..upper)
    }

    /// Uniformly distributed direction on the unit sphere of ℝⁿ.
    pub fn direction(&mut self, n: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..n).map(|_| self.inner.sample(StandardNormal)).collect();
            let len = linalg::norm(&v);
            if len > 1e-300 {
                return linalg::scale(&v, 1.0 / len);
            }
        }
    }

    /// Uniform sample from the open ball `B(center, radius)`.
    pub fn in_ball(&mut self, center: &[f64], radius: f64) -> Vec<f64> {
        let n = center.len();
        let dir = self.direction(n);
        let u: f64 = self.inner.random::<f64>();
        let r = radius * libm::pow(u, 1.0 / n as f64);
        linalg::axpy(center, r, &dir)
    }

    /// Uniform sample from the sphere of the given radius.
    pub fn on_sphere(&mut self, center: &[f64], radius: f64) -> Vec<f64> {
        let dir = self.direction(center.len());
        linalg::axpy(center, radius, &dir)
    }
}
