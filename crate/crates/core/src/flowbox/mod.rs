//! Flow-box charts.
//!
//! Building a chart at `x₁`:
//!
//! 1. normalize: `u = B(x − x₁)` so the base point is the origin and the
//!    normalized field satisfies `f̃(0) = e₁`;
//! 2. take `χ(u) = u₁`, the section `Π = ker χ` and the projection `π`
//!    along `e₁`;
//! 3. find `r₁` with `χ(f̃) > 1/2` and `‖f̃‖ < 2` on `B(0, r₁)`, then
//!    `T = r₁/4` and `r₂ = min{r₁/10, T/2}`;
//! 4. read or estimate `K` on `B(0, r₁)`.
//!
//! On `W₁ = B(0, r₂)` the chart map is `φ(u) = p_u + t_u e₁`, where `p_u` is
//! the point where the solution through `u` crosses `Π` and `t_u` the time it
//! takes to get from there to `u`. `φ` is Lipschitz with constant `7e^{KT}`
//! and its inverse with `2 + 2e^{KT}`.

mod normalize;
mod radii;
mod straighten;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use normalize::{
    choose_chi, normalize, project_pi, swap_map_a, NormalizationRecord, SwapMap, EQUILIBRIUM_TOLERANCE,
};
pub use radii::{
    compute_radii, horizon_for, inner_radius_for, Radii, RadiusFailure, SPEED_BOUND, TRANSVERSALITY_BOUND,
};
pub use straighten::straighten_1d;

use crate::estimate;
use crate::field::{FieldError, VectorField};
use crate::integrate::{self, CrossingOptions, CrossingResult, IntegrateError};
use crate::linalg;

#[derive(Clone, Debug, PartialEq)]
pub enum ChartError {
    Equilibrium { speed: f64 },
    NotLipschitz,
    DimensionMismatch { expected: usize, found: usize },
    NonUnitDirection,
    DependentDirections,
    Construction(RadiusFailure),
    /// Normalized point outside `W₁ = B(0, r₂)`.
    OutsideW1 { norm: f64, r2: f64 },
    /// `φ⁻¹` was asked for a point that is not the image of a point of `W₁`.
    NotInImage { norm: f64, r2: f64 },
    EquilibriumInPath { at: f64 },
    Field(FieldError),
    Integrate(IntegrateError),
    InvalidParameters(&'static str),
}

impl fmt::Display for ChartError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartError::Equilibrium { speed } => {
                write!(f, "base point is an equilibrium: |f(x1)| = {speed}")
            }
            ChartError::NotLipschitz => f.write_str("field is not Lipschitz; charts need a Lipschitz field"),
            ChartError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            ChartError::NonUnitDirection => f.write_str("target direction must have unit norm"),
            ChartError::DependentDirections => f.write_str("directions are linearly dependent"),
            ChartError::Construction(why) => write!(f, "no working radius found: {why}"),
            ChartError::OutsideW1 { norm, r2 } => {
                write!(f, "normalized point has norm {norm}, outside W1 of radius {r2}")
            }
            ChartError::NotInImage { norm, r2 } => write!(
                f,
                "point is not in the image of W1: its preimage has norm {norm}, W1 has radius {r2}"
            ),
            ChartError::EquilibriumInPath { at } => write!(f, "field vanishes or changes sign near {at}"),
            ChartError::Field(e) => write!(f, "{e}"),
            ChartError::Integrate(e) => write!(f, "{e}"),
            ChartError::InvalidParameters(what) => write!(f, "invalid chart parameters: {what}"),
        }
    }
}

impl core::error::Error for ChartError {}

impl From<FieldError> for ChartError {
    fn from(e: FieldError) -> Self {
        ChartError::Field(e)
    }
}

impl From<IntegrateError> for ChartError {
    fn from(e: IntegrateError) -> Self {
        match e {
            IntegrateError::Field(f) => ChartError::Field(f),
            IntegrateError::NotLipschitz => ChartError::NotLipschitz,
            other => ChartError::Integrate(other),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChartConfig {
    pub initial_radius: f64,
    pub radius_samples: usize,
    pub lipschitz_samples: usize,
    pub seed: u64,
    pub integration_tolerance: f64,
    pub crossing_tolerance: f64,
    /// Margin on the sampled radius conditions.
    pub margin: f64,
}

impl Default for ChartConfig {
    fn default() -> Self {
        ChartConfig {
            initial_radius: 1.0,
            radius_samples: 2000,
            lipschitz_samples: 4000,
            seed: 0,
            integration_tolerance: 1e-9,
            crossing_tolerance: 1e-10,
            margin: 0.01,
        }
    }
}

impl ChartConfig {
    fn validate(&self) -> Result<(), ChartError> {
        if !(self.integration_tolerance > 0.0) || !(self.crossing_tolerance > 0.0) {
            return Err(ChartError::InvalidParameters("tolerances must be positive"));
        }
        if self.radius_samples == 0 || self.lipschitz_samples < 2 {
            return Err(ChartError::InvalidParameters("radius_samples >= 1 and lipschitz_samples >= 2 required"));
        }
        Ok(())
    }

    fn crossing_options(&self) -> CrossingOptions {
        CrossingOptions {
            tolerance: self.crossing_tolerance,
            integration_tolerance: self.integration_tolerance,
            ..CrossingOptions::default()
        }
    }
}

/// The numbers that determine a chart once field and base point are fixed.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChartParameters {
    pub base_point: Vec<f64>,
    pub r1: f64,
    pub lipschitz: f64,
    pub lipschitz_exact: bool,
    pub config: ChartConfig,
}

#[derive(Clone, Debug)]
pub struct FlowBoxChart {
    field: VectorField,
    normalized: VectorField,
    normalization: NormalizationRecord,
    chi: Vec<f64>,
    radii: Radii,
    k: f64,
    k_exact: bool,
    k_phi: f64,
    k_phi_inv: f64,
    config: ChartConfig,
}

/// `7e^{KT}`.
pub fn phi_lipschitz_bound(k: f64, t: f64) -> f64 {
    7.0 * libm::exp(k * t)
}

/// `2 + 2e^{KT}`.
pub fn phi_inverse_lipschitz_bound(k: f64, t: f64) -> f64 {
    2.0 + 2.0 * libm::exp(k * t)
}

/// Builds a chart at `x1` with the default configuration.
pub fn build_chart(field: &VectorField, x1: &[f64]) -> Result<FlowBoxChart, ChartError> {
    FlowBoxChart::build(field, x1, ChartConfig::default())
}

impl FlowBoxChart {
    pub fn build(field: &VectorField, x1: &[f64], config: ChartConfig) -> Result<Self, ChartError> {
        config.validate()?;
        let (normalized, normalization) = normalize(field, x1)?;
        let chi = choose_chi(&normalization.z_vector)?;
        let radii = compute_radii(
            &normalized,
            &chi,
            config.initial_radius,
            config.radius_samples,
            config.seed,
            config.margin,
        )?;
        let origin = vec![0.0; field.dimension()];
        let est = estimate::estimate(&normalized, &origin, radii.r1, config.lipschitz_samples, config.seed)?;
        Ok(Self::assemble(field.clone(), normalized, normalization, chi, radii, est.lipschitz_k, est.lipschitz_exact, config))
    }

    /// Rebuilds a chart from stored parameters, re-checking the sampled
    /// radius conditions at the stored `r₁`.
    pub fn from_parameters(field: &VectorField, parameters: &ChartParameters) -> Result<Self, ChartError> {
        let config = parameters.config;
        config.validate()?;
        if !(parameters.r1 > 0.0) || !(parameters.lipschitz >= 0.0) || !parameters.lipschitz.is_finite() {
            return Err(ChartError::InvalidParameters("r1 must be positive and K finite and nonnegative"));
        }
        let (normalized, normalization) = normalize(field, &parameters.base_point)?;
        let chi = choose_chi(&normalization.z_vector)?;
        let radii =
            radii::check_radius(&normalized, &chi, parameters.r1, config.radius_samples, config.seed, config.margin)?;
        Ok(Self::assemble(
            field.clone(),
            normalized,
            normalization,
            chi,
            radii,
            parameters.lipschitz,
            parameters.lipschitz_exact,
            config,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        field: VectorField,
        normalized: VectorField,
        normalization: NormalizationRecord,
        chi: Vec<f64>,
        radii: Radii,
        k: f64,
        k_exact: bool,
        config: ChartConfig,
    ) -> Self {
        let k_phi = phi_lipschitz_bound(k, radii.t);
        let k_phi_inv = phi_inverse_lipschitz_bound(k, radii.t);
        FlowBoxChart { field, normalized, normalization, chi, radii, k, k_exact, k_phi, k_phi_inv, config }
    }

    pub fn parameters(&self) -> ChartParameters {
        ChartParameters {
            base_point: self.normalization.base_point.clone(),
            r1: self.radii.r1,
            lipschitz: self.k,
            lipschitz_exact: self.k_exact,
            config: self.config,
        }
    }

    pub fn dimension(&self) -> usize {
        self.field.dimension()
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn normalized_field(&self) -> &VectorField {
        &self.normalized
    }

    pub fn normalization(&self) -> &NormalizationRecord {
        &self.normalization
    }

    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    /// The target direction `z = e₁`.
    pub fn z(&self) -> &[f64] {
        &self.normalization.z_vector
    }

    pub fn radii(&self) -> &Radii {
        &self.radii
    }

    pub fn r1(&self) -> f64 {
        self.radii.r1
    }

    pub fn t(&self) -> f64 {
        self.radii.t
    }

    pub fn r2(&self) -> f64 {
        self.radii.r2
    }

    /// Lipschitz constant of the normalized field on `B(0, r₁)`.
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn k_is_exact(&self) -> bool {
        self.k_exact
    }

    /// Speed bound of the normalized field on `B(0, r₁)`.
    pub fn m(&self) -> f64 {
        SPEED_BOUND
    }

    pub fn k_phi(&self) -> f64 {
        self.k_phi
    }

    pub fn k_phi_inv(&self) -> f64 {
        self.k_phi_inv
    }

    pub fn config(&self) -> &ChartConfig {
        &self.config
    }

    pub fn integration_tolerance(&self) -> f64 {
        self.config.integration_tolerance
    }

    pub fn crossing_tolerance(&self) -> f64 {
        self.config.crossing_tolerance
    }

    pub fn in_w1(&self, u: &[f64]) -> bool {
        u.len() == self.dimension() && linalg::norm(u) < self.radii.r2
    }

    fn check_w1(&self, u: &[f64]) -> Result<(), ChartError> {
        if u.len() != self.dimension() {
            return Err(ChartError::DimensionMismatch { expected: self.dimension(), found: u.len() });
        }
        let norm = linalg::norm(u);
        if !(norm < self.radii.r2) {
            return Err(ChartError::OutsideW1 { norm, r2: self.radii.r2 });
        }
        Ok(())
    }

    /// Local flow of the normalized field.
    pub fn flow(&self, u: &[f64], t: f64) -> Result<Vec<f64>, ChartError> {
        Ok(integrate::local_flow(&self.normalized, u, t, self.config.integration_tolerance)?)
    }

    /// Crossing data `(t_u, p_u)` of a normalized point `u ∈ W₁`.
    pub fn crossing(&self, u: &[f64]) -> Result<CrossingResult, ChartError> {
        self.check_w1(u)?;
        Ok(integrate::crossing_time(&self.normalized, u, &self.chi, self.radii.t, &self.config.crossing_options())?)
    }

    /// `φ(u) = p_u + t_u e₁` for normalized `u ∈ W₁`.
    pub fn phi(&self, u: &[f64]) -> Result<Vec<f64>, ChartError> {
        let c = self.crossing(u)?;
        Ok(linalg::axpy(&c.p_x, c.t_x, self.z()))
    }

    /// `φ⁻¹(w) = σ_{π(w)}(χ(w))`, accepted only when the result lies in `W₁`.
    pub fn phi_inverse(&self, w: &[f64]) -> Result<Vec<f64>, ChartError> {
        if w.len() != self.dimension() {
            return Err(ChartError::DimensionMismatch { expected: self.dimension(), found: w.len() });
        }
        let t = linalg::dot(&self.chi, w);
        let p = project_pi(&self.chi, self.z(), w);
        // Images of W₁ have |t| < T and feet in B(0, r₁/2).
        let foot = linalg::norm(&p);
        if !(libm::fabs(t) < self.radii.t) || !(foot < 0.5 * self.radii.r1) {
            return Err(ChartError::NotInImage { norm: f64::INFINITY, r2: self.radii.r2 });
        }
        let u = match self.flow(&p, t) {
            Ok(u) => u,
            Err(ChartError::Field(_) | ChartError::Integrate(_)) => {
                return Err(ChartError::NotInImage { norm: f64::INFINITY, r2: self.radii.r2 })
            }
            Err(e) => return Err(e),
        };
        let norm = linalg::norm(&u);
        if !(norm < self.radii.r2) {
            return Err(ChartError::NotInImage { norm, r2: self.radii.r2 });
        }
        Ok(u)
    }

    /// `Φ(x) = φ(B(x − x₁))` in the original coordinates; it conjugates the
    /// original flow to translation along `e₁`.
    pub fn phi_global(&self, x: &[f64]) -> Result<Vec<f64>, ChartError> {
        if x.len() != self.dimension() {
            return Err(ChartError::DimensionMismatch { expected: self.dimension(), found: x.len() });
        }
        self.phi(&self.normalization.to_normalized(x))
    }

    pub fn phi_inverse_global(&self, w: &[f64]) -> Result<Vec<f64>, ChartError> {
        Ok(self.normalization.from_normalized(&self.phi_inverse(w)?))
    }

    /// A radius `s₄ > 0` with `B(φ(u), s₄) ⊆ φ(W₁)`:
    ///
    /// * `s₁ = r₂ − ‖u‖`,
    /// * `s₂ = min{T − |t_u|, s₁/4}`,
    /// * `s₃ = min{r₁/2 − ‖p_u‖, (s₁/2)e^{−KT}}`,
    /// * `s₄ = min{s₂, s₃/2}`.
    ///
    /// For `w` within `s₄` of `φ(u)`, `|χ(w)| < T` and `‖π(w) − p_u‖ < s₃`, and
    /// the dependence estimate keeps `σ_{π(w)}(χ(w))` within `s₁` of `u`.
    pub fn certified_interior_radius(&self, u: &[f64]) -> Result<f64, ChartError> {
        self.check_w1(u)?;
        let c = self.crossing(u)?;
        Ok(self.interior_radius_from(u, &c))
    }

    pub(crate) fn interior_radius_from(&self, u: &[f64], c: &CrossingResult) -> f64 {
        let s1 = self.radii.r2 - linalg::norm(u);
        let s2 = libm::fmin(self.radii.t - libm::fabs(c.t_x), s1 / 4.0);
        let s3 = libm::fmin(
            0.5 * self.radii.r1 - linalg::norm(&c.p_x),
            0.5 * s1 * libm::exp(-self.k * self.radii.t),
        );
        libm::fmin(s2, s3 / 2.0)
    }

    /// FNV-1a hash of everything that determines the chart's maps.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        h.bytes(self.field.label().as_bytes());
        h.u64(self.dimension() as u64);
        h.floats(&self.normalization.base_point);
        h.floats(self.normalization.linear_map.row_major());
        h.floats(&self.chi);
        h.floats(&[self.radii.r1, self.radii.t, self.radii.r2, self.k, SPEED_BOUND, self.k_phi, self.k_phi_inv]);
        h.u64(self.k_exact as u64);
        let c = &self.config;
        h.floats(&[c.initial_radius, c.integration_tolerance, c.crossing_tolerance, c.margin]);
        h.u64(c.radius_samples as u64);
        h.u64(c.lipschitz_samples as u64);
        h.u64(c.seed);
        h.finish()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn bytes(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }

    fn floats(&mut self, vs: &[f64]) {
        for v in vs {
            self.u64(v.to_bits());
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        let d = linalg::distance(a, b);
        assert!(d <= tol, "{a:?} vs {b:?}: {d}");
    }

    #[test]
    fn abs_shear_chart_constants() {
        let chart = build_chart(&builtin::abs_shear(), &[0.0, 0.0]).unwrap();
        assert!((0.9..=1.0).contains(&chart.r1()));
        assert_eq!(chart.t(), chart.r1() / 4.0);
        assert_eq!(chart.r2(), libm::fmin(chart.r1() / 10.0, chart.t() / 2.0));
        assert_eq!(chart.k(), 1.0);
        assert!(chart.k_is_exact());
        assert_eq!(chart.k_phi(), 7.0 * libm::exp(chart.t()));
        assert_eq!(chart.k_phi_inv(), 2.0 + 2.0 * libm::exp(chart.t()));
        assert!((phi_lipschitz_bound(1.0, 0.25) - 8.988178).abs() < 1e-6);
        assert!((phi_inverse_lipschitz_bound(1.0, 0.25) - 4.568051).abs() < 1e-6);
    }

    #[test]
    fn constant_chart_bounds() {
        let chart = build_chart(&builtin::constant_e1(), &[0.0, 0.0]).unwrap();
        assert_eq!((chart.r1(), chart.t(), chart.r2()), (1.0, 0.25, 0.1));
        assert_eq!((chart.k(), chart.k_phi(), chart.k_phi_inv()), (0.0, 7.0, 4.0));
    }

    #[test]
    fn phi_matches_closed_forms() {
        let abs = build_chart(&builtin::abs_shear(), &[0.0, 0.0]).unwrap();
        assert_close(&abs.phi(&[0.05, 0.02]).unwrap(), &[0.05 / 1.02, 0.02], 1e-8);
        assert_close(&abs.phi_inverse(&[0.05 / 1.02, 0.02]).unwrap(), &[0.05, 0.02], 1e-7);
        assert_eq!(abs.phi(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(abs.phi_inverse(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);

        let exp = build_chart(&builtin::exp_shear(), &[0.0, 0.0]).unwrap();
        assert_close(&exp.phi(&[0.01, 0.01]).unwrap(), &[0.01, 0.01 * libm::exp(-0.01)], 1e-8);
        assert_close(&exp.phi_inverse(&[0.01, 0.01 * libm::exp(-0.01)]).unwrap(), &[0.01, 0.01], 1e-8);
    }

    #[test]
    fn outside_w1_is_rejected() {
        let chart = build_chart(&builtin::abs_shear(), &[0.0, 0.0]).unwrap();
        assert!(matches!(chart.phi(&[0.5, 0.0]), Err(ChartError::OutsideW1 { .. })));
        assert!(matches!(chart.phi_inverse(&[0.2, 0.0]), Err(ChartError::NotInImage { .. })));
    }

    #[test]
    fn equilibrium_and_step_field_rejected() {
        assert!(matches!(build_chart(&builtin::linear_growth(), &[0.0]), Err(ChartError::Equilibrium { .. })));
        assert!(matches!(build_chart(&builtin::step_field(), &[0.0]), Err(ChartError::NotLipschitz)));
    }

    #[test]
    fn certified_radius_constant_field() {
        let chart = build_chart(&builtin::constant_e1(), &[0.0, 0.0]).unwrap();
        assert_eq!(chart.certified_interior_radius(&[0.0, 0.0]).unwrap(), 0.025);
    }

    #[test]
    fn global_chart_conjugates_original_flow() {
        let f = builtin::exp_shear();
        let x1 = [0.3, 0.5];
        let chart = build_chart(&f, &x1).unwrap();
        assert!(chart.normalization().linear_map.distance_from_identity() > 0.1);
        let x = [0.31, 0.5];
        let t = 0.005;
        let fx = integrate::local_flow(&f, &x, t, 1e-12).unwrap();
        let lhs = chart.phi_global(&fx).unwrap();
        let rhs = linalg::axpy(&chart.phi_global(&x).unwrap(), t, chart.z());
        assert_close(&lhs, &rhs, 1e-7);
        assert_close(&chart.phi_inverse_global(&chart.phi_global(&x).unwrap()).unwrap(), &x, 1e-8);
    }

    #[test]
    fn parameters_rebuild_identical_chart() {
        let chart = build_chart(&builtin::abs_shear(), &[0.0, 0.0]).unwrap();
        let again = FlowBoxChart::from_parameters(&builtin::abs_shear(), &chart.parameters()).unwrap();
        assert_eq!(again.fingerprint(), chart.fingerprint());
        let mut bad = chart.parameters();
        bad.r1 = 1.5;
        assert!(matches!(
            FlowBoxChart::from_parameters(&builtin::abs_shear(), &bad),
            Err(ChartError::Construction(RadiusFailure::Speed { .. }))
        ));
    }
}
