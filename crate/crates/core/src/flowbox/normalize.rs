//! Affine change of coordinates putting the base point at the origin with
//! `f̃(0) = e₁`.

use alloc::format;
use alloc::vec::Vec;

use super::ChartError;
use crate::field::VectorField;
use crate::linalg::{self, Matrix};

/// `f(x₁)` below this norm counts as an equilibrium.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-12;

/// Cosine of the angle between `y` and `z` above which they count as
/// dependent.
const DEPENDENCE_COSINE: f64 = 1.0 - 1e-12;

/// The involution `A(x) = x + ψ̄(x)(y − z)` exchanging `y` and `z`, where
/// `ψ̄` is `ψ(ay + bz) = b − a` on `span{y, z}` extended by zero on the
/// orthogonal complement.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapMap {
    /// Representer of `ψ̄`: `ψ̄(x) = ⟨psi_bar, x⟩`.
    pub psi_bar: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl SwapMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let shift = linalg::dot(&self.psi_bar, x);
        x.iter().zip(self.y.iter().zip(&self.z)).map(|(xi, (yi, zi))| xi + shift * (yi - zi)).collect()
    }

    pub fn psi(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.psi_bar, x)
    }

    pub fn matrix(&self) -> Matrix {
        let n = self.y.len();
        let mut a = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let v = a.get(i, j) + (self.y[i] - self.z[i]) * self.psi_bar[j];
                a.set(i, j, v);
            }
        }
        a
    }

    /// `‖A‖ ≤ 1 + ‖y − z‖·‖ψ̄‖`.
    pub fn norm_bound(&self) -> f64 {
        1.0 + linalg::distance(&self.y, &self.z) * linalg::norm(&self.psi_bar)
    }
}

pub fn swap_map_a(y: &[f64], z: &[f64]) -> Result<SwapMap, ChartError> {
    if y.len() != z.len() {
        return Err(ChartError::DimensionMismatch { expected: z.len(), found: y.len() });
    }
    if libm::fabs(linalg::norm(z) - 1.0) > 1e-12 {
        return Err(ChartError::NonUnitDirection);
    }
    let yy = linalg::dot(y, y);
    let zz = linalg::dot(z, z);
    let yz = linalg::dot(y, z);
    if yy == 0.0 || libm::fabs(yz) >= DEPENDENCE_COSINE * libm::sqrt(yy * zz) {
        return Err(ChartError::DependentDirections);
    }
    // ψ̄ = αy + βz with ⟨ψ̄, y⟩ = −1 and ⟨ψ̄, z⟩ = 1.
    let det = yy * zz - yz * yz;
    let alpha = (-zz - yz) / det;
    let beta = (yy + yz) / det;
    let psi_bar = y.iter().zip(z).map(|(a, b)| alpha * a + beta * b).collect();
    Ok(SwapMap { psi_bar, y: y.to_vec(), z: z.to_vec() })
}

/// `χ(x) = ⟨x, z⟩`: `χ(z) = 1` and `|χ(x)| ≤ ‖x‖` by Cauchy–Schwarz.
pub fn choose_chi(z: &[f64]) -> Result<Vec<f64>, ChartError> {
    if libm::fabs(linalg::norm(z) - 1.0) > 1e-12 {
        return Err(ChartError::NonUnitDirection);
    }
    Ok(z.to_vec())
}

/// `π(q) = q − χ(q)·z`, the projection onto `Π = ker χ` along `z`.
pub fn project_pi(chi: &[f64], z: &[f64], q: &[f64]) -> Vec<f64> {
    linalg::axpy(q, -linalg::dot(chi, q), z)
}

/// The linear part `B` of the normalization `u = B(x − x₁)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationRecord {
    pub base_point: Vec<f64>,
    pub linear_map: Matrix,
    pub linear_map_inverse: Matrix,
    /// `B` is the swap involution rather than scaling ∘ reflection.
    pub used_swap_map: bool,
    pub psi_bar: Option<Vec<f64>>,
    /// `f(x₁)`.
    pub y_vector: Vec<f64>,
    /// `e₁`.
    pub z_vector: Vec<f64>,
    /// Upper bounds on the operator norms of `B` and `B⁻¹`.
    pub forward_norm_bound: f64,
    pub inverse_norm_bound: f64,
}

impl NormalizationRecord {
    pub fn to_normalized(&self, x: &[f64]) -> Vec<f64> {
        self.linear_map.apply(&linalg::sub(x, &self.base_point))
    }

    pub fn from_normalized(&self, u: &[f64]) -> Vec<f64> {
        linalg::add(&self.base_point, &self.linear_map_inverse.apply(u))
    }

    /// Maps a velocity at `x` to the corresponding normalized velocity.
    pub fn push_forward(&self, v: &[f64]) -> Vec<f64> {
        self.linear_map.apply(v)
    }
}

/// Builds `f̃(u) = B f(x₁ + B⁻¹u)` with `f̃(0) = e₁`.
///
/// `B = D∘H` with `H` the reflection taking `f(x₁)/‖f(x₁)‖` to `e₁` and
/// `D = diag(1/‖f(x₁)‖, 1, …, 1)`, so time is not rescaled. When
/// `‖f(x₁)‖ = 1` and `f(x₁)`, `e₁` are independent, the swap involution is
/// used instead. Solutions correspond through `u = B(x − x₁)` at equal times.
pub fn normalize(field: &VectorField, x1: &[f64]) -> Result<(VectorField, NormalizationRecord), ChartError> {
    if !field.is_lipschitz() {
        return Err(ChartError::NotLipschitz);
    }
    let n = field.dimension();
    let y = field.eval(x1)?;
    let speed = linalg::norm(&y);
    if speed <= EQUILIBRIUM_TOLERANCE {
        return Err(ChartError::Equilibrium { speed });
    }
    let z = linalg::unit(n, 0);

    let record = match swap_map_a(&y, &z) {
        Ok(swap) if libm::fabs(speed - 1.0) <= 1e-12 => {
            let a = swap.matrix();
            let bound = swap.norm_bound();
            NormalizationRecord {
                base_point: x1.to_vec(),
                linear_map: a.clone(),
                linear_map_inverse: a,
                used_swap_map: true,
                psi_bar: Some(swap.psi_bar),
                y_vector: y,
                z_vector: z,
                forward_norm_bound: bound,
                inverse_norm_bound: bound,
            }
        }
        _ => {
            let h = Matrix::reflection_to_e1(&linalg::scale(&y, 1.0 / speed));
            let mut b = h.clone();
            let mut b_inv = h;
            for j in 0..n {
                b.set(0, j, b.get(0, j) / speed);
                b_inv.set(j, 0, b_inv.get(j, 0) * speed);
            }
            NormalizationRecord {
                base_point: x1.to_vec(),
                linear_map: b,
                linear_map_inverse: b_inv,
                used_swap_map: false,
                psi_bar: None,
                y_vector: y,
                z_vector: z,
                forward_norm_bound: libm::fmax(1.0 / speed, 1.0),
                inverse_norm_bound: libm::fmax(speed, 1.0),
            }
        }
    };

    let slack = field.domain_radius() - linalg::distance(x1, field.domain_center());
    if !(slack > 0.0) {
        return Err(ChartError::InvalidParameters("base point lies on the boundary of the field domain"));
    }
    let radius = slack / record.inverse_norm_bound;
    let inner = field.clone();
    let map = record.clone();
    let mut normalized = VectorField::new(n, format!("{} (normalized)", field.label()), radius, move |u, out| {
        let x = map.from_normalized(u);
        inner.eval_into(&x, out)?;
        let v = map.push_forward(out);
        out.copy_from_slice(&v);
        Ok(())
    });
    if let Some(k) = field.known_lipschitz() {
        normalized = normalized.with_known_lipschitz(k * record.forward_norm_bound * record.inverse_norm_bound);
    }
    if let Some(m) = field.known_speed_bound() {
        normalized = normalized.with_known_speed_bound(m * record.forward_norm_bound);
    }
    Ok((normalized, record))
}
