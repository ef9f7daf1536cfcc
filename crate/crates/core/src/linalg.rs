//! Dense vector and matrix helpers for small dimensions.

use alloc::vec;
use alloc::vec::Vec;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    let plain: f64 = a.iter().map(|x| x * x).sum();
    if plain.is_finite() && plain > 1e-290 {
        return libm::sqrt(plain);
    }
    // Rescale when squaring overflows or underflows.
    let scale = a.iter().fold(0.0_f64, |m, x| m.max(libm::fabs(*x)));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = a.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * libm::sqrt(sum)
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s·b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b))
}

/// `i`-th standard basis vector of ℝⁿ.
pub fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

pub fn is_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { n, data }
    }

    /// Builds a matrix from row-major entries. Returns `None` unless
    /// `data.len()` is a perfect square `n²` with `n > 0`.
    pub fn from_row_major(data: Vec<f64>) -> Option<Self> {
        let n = (libm::sqrt(data.len() as f64) + 0.5) as usize;
        if n == 0 || n * n != data.len() {
            return None;
        }
        Some(Matrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        self.data.chunks_exact(self.n).map(|row| dot(row, x)).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix { n, data: vec![0.0; n * n] };
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Largest absolute entry of `self − I`.
    pub fn distance_from_identity(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max(libm::fabs(self.get(i, j) - target));
            }
        }
        worst
    }

    /// Householder reflection `I − 2vvᵀ/(vᵀv)` sending the unit vector `u`
    /// to `e₁`. Uses the cancellation-free form of `v₁ = u₁ − 1` when
    /// `u₁ > 0`, and the identity when `u` already equals `e₁`.
    pub fn reflection_to_e1(u: &[f64]) -> Matrix {
        let n = u.len();
        let tail: f64 = u[1..].iter().map(|x| x * x).sum();
        if tail == 0.0 && u[0] > 0.0 {
            return Matrix::identity(n);
        }
        let mut v = u.to_vec();
        v[0] = if u[0] > 0.0 { -tail / (u[0] + 1.0) } else { u[0] - 1.0 };
        let vv = dot(&v, &v);
        let mut h = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let value = h.get(i, j) - 2.0 * v[i] * v[j] / vv;
                h.set(i, j, value);
            }
        }
        h
    }
}
