//! Sampled audits of a chart and of the flow it straightens.
//!
//! Every report records the seed and tolerances it ran with; chart audits
//! also record the chart fingerprint. Samples come from [`SampleRng`]
//! streams keyed by the seed, and every reduction is a running max or
//! count over samples in a fixed order, so equal inputs give equal reports.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::field::{FieldError, PiecewiseConstant1d, VectorField};
use crate::flowbox::{ChartError, FlowBoxChart};
use crate::integrate::{self, dependence_bound, IntegrateError};
use crate::linalg;
use crate::rng::SampleRng;

/// Relative slack allowed on the continuous dependence and `φ⁻¹` bounds.
pub const BOUND_SLACK: f64 = 1e-6;

/// A conjugacy run fails when more than this fraction of drawn samples is
/// rejected because the flow left `W₁`.
pub const MAX_REJECTION_RATE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub enum VerifyError {
    Chart(ChartError),
    Integrate(IntegrateError),
    Field(FieldError),
    /// Too many samples had to be discarded.
    Rejection { accepted: usize, attempts: usize, requested: usize },
    InvalidArgument(&'static str),
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::Chart(e) => write!(f, "{e}"),
            VerifyError::Integrate(e) => write!(f, "{e}"),
            VerifyError::Field(e) => write!(f, "{e}"),
            VerifyError::Rejection { accepted, attempts, requested } => write!(
                f,
                "only {accepted} of {attempts} drawn samples stayed in W1 ({requested} requested, at most 50% may be rejected)"
            ),
            VerifyError::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
        }
    }
}

impl core::error::Error for VerifyError {}

impl From<ChartError> for VerifyError {
    fn from(e: ChartError) -> Self {
        VerifyError::Chart(e)
    }
}

impl From<IntegrateError> for VerifyError {
    fn from(e: IntegrateError) -> Self {
        VerifyError::Integrate(e)
    }
}

impl From<FieldError> for VerifyError {
    fn from(e: FieldError) -> Self {
        VerifyError::Field(e)
    }
}

fn fingerprint_hex(chart: &FlowBoxChart) -> String {
    format!("{:016x}", chart.fingerprint())
}

fn origin(n: usize) -> Vec<f64> {
    vec![0.0; n]
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Tolerances {
    pub integration: f64,
    pub crossing: f64,
}

impl Tolerances {
    fn of(chart: &FlowBoxChart) -> Self {
        Tolerances { integration: chart.integration_tolerance(), crossing: chart.crossing_tolerance() }
    }
}

/// Residuals at one accepted `(x, t)` sample.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConjugacySample {
    pub x: Vec<f64>,
    pub t: f64,
    /// `‖φ(F(x,t)) − φ(x) − t·e₁‖`.
    pub conjugacy: f64,
    /// `‖φ⁻¹(φ(x)) − x‖`.
    pub roundtrip: f64,
    /// `‖p_{F(x,t)} − p_x‖`.
    pub foot: f64,
    /// `|t_{F(x,t)} − (t_x + t)|`.
    pub time_shift: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConjugacyReport {
    pub samples: usize,
    pub attempts: usize,
    pub rejected: usize,
    pub max_conjugacy_residual: f64,
    pub max_roundtrip_residual: f64,
    pub max_foot_invariance_residual: f64,
    pub max_time_shift_residual: f64,
    pub t_range: (f64, f64),
    pub seed: u64,
    pub tolerances: Tolerances,
    pub chart_fingerprint: String,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub per_sample: Vec<ConjugacySample>,
}

/// Draws `x ∈ W₁` and `t ∈ [−t_max, t_max]`, discards pairs with
/// `F(x, t) ∉ W₁` and records the conjugacy, round-trip and foot-point
/// residuals of the rest (all in normalized coordinates). Stops after
/// `samples` accepted pairs or `4·samples` draws.
pub fn verify_conjugacy(
    chart: &FlowBoxChart,
    samples: usize,
    t_max: f64,
    seed: u64,
) -> Result<ConjugacyReport, VerifyError> {
    if samples == 0 || !(t_max > 0.0) || t_max > chart.t() / 2.0 {
        return Err(VerifyError::InvalidArgument("need samples >= 1 and 0 < t_max <= T/2"));
    }
    let n = chart.dimension();
    let z = chart.z();
    let mut rng = SampleRng::stream(seed, 1);
    let mut report = ConjugacyReport {
        samples: 0,
        attempts: 0,
        rejected: 0,
        max_conjugacy_residual: 0.0,
        max_roundtrip_residual: 0.0,
        max_foot_invariance_residual: 0.0,
        max_time_shift_residual: 0.0,
        t_range: (-t_max, t_max),
        seed,
        tolerances: Tolerances::of(chart),
        chart_fingerprint: fingerprint_hex(chart),
        per_sample: Vec::with_capacity(samples),
    };
    while report.samples < samples && report.attempts < 4 * samples {
        report.attempts += 1;
        let x = rng.in_ball(&origin(n), chart.r2());
        let t = rng.uniform(-t_max, t_max);
        let y = chart.flow(&x, t)?;
        if !chart.in_w1(&y) {
            report.rejected += 1;
            continue;
        }
        let cx = chart.crossing(&x)?;
        let cy = chart.crossing(&y)?;
        let phi_x = linalg::axpy(&cx.p_x, cx.t_x, z);
        let phi_y = linalg::axpy(&cy.p_x, cy.t_x, z);
        let back = chart.phi_inverse(&phi_x)?;
        let sample = ConjugacySample {
            conjugacy: linalg::distance(&phi_y, &linalg::axpy(&phi_x, t, z)),
            roundtrip: linalg::distance(&back, &x),
            foot: linalg::distance(&cy.p_x, &cx.p_x),
            time_shift: libm::fabs(cy.t_x - (cx.t_x + t)),
            x,
            t,
        };
        report.max_conjugacy_residual = report.max_conjugacy_residual.max(sample.conjugacy);
        report.max_roundtrip_residual = report.max_roundtrip_residual.max(sample.roundtrip);
        report.max_foot_invariance_residual = report.max_foot_invariance_residual.max(sample.foot);
        report.max_time_shift_residual = report.max_time_shift_residual.max(sample.time_shift);
        report.per_sample.push(sample);
        report.samples += 1;
    }
    if report.samples < samples || report.rejected as f64 > MAX_REJECTION_RATE * report.attempts as f64 {
        return Err(VerifyError::Rejection { accepted: report.samples, attempts: report.attempts, requested: samples });
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundTripReport {
    pub samples: usize,
    pub max_roundtrip_residual: f64,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub chart_fingerprint: String,
}

/// `max ‖φ⁻¹(φ(x)) − x‖` over `samples` points of `W₁`.
pub fn roundtrip_audit(chart: &FlowBoxChart, samples: usize, seed: u64) -> Result<RoundTripReport, VerifyError> {
    let mut rng = SampleRng::stream(seed, 2);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let x = rng.in_ball(&origin(chart.dimension()), chart.r2());
        let back = chart.phi_inverse(&chart.phi(&x)?)?;
        worst = worst.max(linalg::distance(&back, &x));
    }
    Ok(RoundTripReport {
        samples,
        max_roundtrip_residual: worst,
        seed,
        tolerances: Tolerances::of(chart),
        chart_fingerprint: fingerprint_hex(chart),
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LipschitzScanReport {
    pub pair_count: usize,
    pub max_ratio_phi: f64,
    /// `7e^{KT}`.
    pub bound_phi: f64,
    pub max_ratio_phi_inv: f64,
    /// `2 + 2e^{KT}`.
    pub bound_phi_inv: f64,
    pub violations_phi: usize,
    pub violations_phi_inv: usize,
    /// Pairs with `‖x − y‖ > K_{φ⁻¹}‖φ(x) − φ(y)‖(1 + slack)`; includes
    /// coinciding images of distinct points.
    pub injectivity_violations: usize,
    pub violations: usize,
    pub k: f64,
    pub k_exact: bool,
    pub t: f64,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub chart_fingerprint: String,
}

/// Difference ratios of `φ` on pairs `x, y ∈ W₁`, and of `φ⁻¹` on the
/// image pairs `φ(x), φ(y)` with `φ⁻¹` evaluated explicitly.
pub fn lipschitz_ratio_scan(
    chart: &FlowBoxChart,
    pair_count: usize,
    seed: u64,
) -> Result<LipschitzScanReport, VerifyError> {
    let n = chart.dimension();
    let mut rng = SampleRng::stream(seed, 3);
    let mut report = LipschitzScanReport {
        pair_count,
        max_ratio_phi: 0.0,
        bound_phi: chart.k_phi(),
        max_ratio_phi_inv: 0.0,
        bound_phi_inv: chart.k_phi_inv(),
        violations_phi: 0,
        violations_phi_inv: 0,
        injectivity_violations: 0,
        violations: 0,
        k: chart.k(),
        k_exact: chart.k_is_exact(),
        t: chart.t(),
        seed,
        tolerances: Tolerances::of(chart),
        chart_fingerprint: fingerprint_hex(chart),
    };
    for _ in 0..pair_count {
        let x = rng.in_ball(&origin(n), chart.r2());
        let y = rng.in_ball(&origin(n), chart.r2());
        let dxy = linalg::distance(&x, &y);
        if dxy == 0.0 {
            continue;
        }
        let (u, v) = (chart.phi(&x)?, chart.phi(&y)?);
        let duv = linalg::distance(&u, &v);
        let ratio = duv / dxy;
        report.max_ratio_phi = report.max_ratio_phi.max(ratio);
        if ratio > report.bound_phi {
            report.violations_phi += 1;
        }
        if dxy > report.bound_phi_inv * duv * (1.0 + BOUND_SLACK) {
            report.injectivity_violations += 1;
        }
        if duv == 0.0 {
            continue;
        }
        let (a, b) = (chart.phi_inverse(&u)?, chart.phi_inverse(&v)?);
        let ratio_inv = linalg::distance(&a, &b) / duv;
        report.max_ratio_phi_inv = report.max_ratio_phi_inv.max(ratio_inv);
        if ratio_inv > report.bound_phi_inv {
            report.violations_phi_inv += 1;
        }
    }
    report.violations = report.violations_phi + report.violations_phi_inv + report.injectivity_violations;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DependenceConfig {
    pub k: f64,
    pub k_exact: bool,
    pub center: Vec<f64>,
    pub radius: f64,
    pub pair_count: usize,
    /// Times are drawn uniformly from `[t_min, t_max]`.
    pub t_min: f64,
    pub t_max: f64,
    pub seed: u64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DependenceReport {
    pub config: DependenceConfig,
    /// Extremes of `‖σ_x(t) − σ_y(t)‖ / (‖x − y‖e^{K|t|})`.
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub slack: f64,
    pub violations: usize,
}

/// Checks `‖σ_x(t) − σ_y(t)‖ ≤ ‖x − y‖e^{K|t|}(1 + slack)` on sampled pairs
/// in a ball.
pub fn dependence_audit(field: &VectorField, config: &DependenceConfig) -> Result<DependenceReport, VerifyError> {
    if !(config.t_min <= config.t_max) || !(config.radius > 0.0) || !(config.k >= 0.0) {
        return Err(VerifyError::InvalidArgument("need t_min <= t_max, radius > 0, K >= 0"));
    }
    let mut rng = SampleRng::stream(config.seed, 4);
    let mut report = DependenceReport {
        config: config.clone(),
        max_ratio: 0.0,
        min_ratio: f64::INFINITY,
        slack: BOUND_SLACK,
        violations: 0,
    };
    for _ in 0..config.pair_count {
        let x = rng.in_ball(&config.center, config.radius);
        let y = rng.in_ball(&config.center, config.radius);
        let t = if config.t_min == config.t_max { config.t_min } else { rng.uniform(config.t_min, config.t_max) };
        let d = linalg::distance(&x, &y);
        if d == 0.0 {
            continue;
        }
        let sx = integrate::local_flow(field, &x, t, config.tolerance)?;
        let sy = integrate::local_flow(field, &y, t, config.tolerance)?;
        let ratio = linalg::distance(&sx, &sy) / dependence_bound(config.k, d, t);
        report.max_ratio = report.max_ratio.max(ratio);
        report.min_ratio = report.min_ratio.min(ratio);
        if ratio > 1.0 + BOUND_SLACK {
            report.violations += 1;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlowAxiomsReport {
    pub samples: usize,
    /// `max ‖F(x, 0) − x‖`.
    pub max_identity_residual: f64,
    /// `max ‖F(x, s + t) − F(F(x, s), t)‖`.
    pub max_semigroup_residual: f64,
    pub center: Vec<f64>,
    pub radius: f64,
    pub t_max: f64,
    pub seed: u64,
    pub tolerance: f64,
}

/// Draws `x` in `B(center, radius)` and `s, t` with `|s|, |t| ≤ t_max`.
pub fn flow_axioms_check(
    field: &VectorField,
    center: &[f64],
    radius: f64,
    t_max: f64,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<FlowAxiomsReport, VerifyError> {
    let mut rng = SampleRng::stream(seed, 5);
    let mut report = FlowAxiomsReport {
        samples,
        max_identity_residual: 0.0,
        max_semigroup_residual: 0.0,
        center: center.to_vec(),
        radius,
        t_max,
        seed,
        tolerance,
    };
    for _ in 0..samples {
        let x = rng.in_ball(center, radius);
        let s = rng.uniform(-t_max, t_max);
        let t = rng.uniform(-t_max, t_max);
        let still = integrate::local_flow(field, &x, 0.0, tolerance)?;
        report.max_identity_residual = report.max_identity_residual.max(linalg::distance(&still, &x));
        let direct = integrate::local_flow(field, &x, s + t, tolerance)?;
        let mid = integrate::local_flow(field, &x, s, tolerance)?;
        let composed = integrate::local_flow(field, &mid, t, tolerance)?;
        report.max_semigroup_residual = report.max_semigroup_residual.max(linalg::distance(&direct, &composed));
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SlopePair {
    pub right: f64,
    pub left: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JacobianJumpReport {
    pub probe_point: Vec<f64>,
    pub axis: usize,
    pub step_sizes: Vec<f64>,
    /// `one_sided_slopes[i][j]`: slopes of component `j` of `φ` at step `i`.
    pub one_sided_slopes: Vec<Vec<SlopePair>>,
    /// Extrapolated `right − left` per component.
    pub component_jumps: Vec<f64>,
    /// Largest `|component_jumps[j]|`.
    pub estimated_jump: f64,
    pub tolerances: Tolerances,
    pub chart_fingerprint: String,
}

/// One-sided difference quotients of `φ` along `axis` at `probe`, for
/// decreasing `step_sizes`. The jump `right − left` is extrapolated to
/// zero step from the two smallest steps assuming an error linear in the
/// step: `J = (h₁J(h₂) − h₂J(h₁))/(h₁ − h₂)`.
pub fn nonsmoothness_probe(
    chart: &FlowBoxChart,
    probe: &[f64],
    axis: usize,
    step_sizes: &[f64],
) -> Result<JacobianJumpReport, VerifyError> {
    let n = chart.dimension();
    if axis >= n || probe.len() != n {
        return Err(VerifyError::InvalidArgument("probe axis or dimension out of range"));
    }
    if step_sizes.len() < 2
        || step_sizes.iter().any(|h| !(*h > 0.0))
        || step_sizes.windows(2).any(|w| !(w[0] > w[1]))
    {
        return Err(VerifyError::InvalidArgument("need at least two strictly decreasing positive steps"));
    }
    let e = linalg::unit(n, axis);
    let centre = chart.phi(probe)?;
    let mut slopes = Vec::with_capacity(step_sizes.len());
    for &h in step_sizes {
        let ahead = chart.phi(&linalg::axpy(probe, h, &e))?;
        let behind = chart.phi(&linalg::axpy(probe, -h, &e))?;
        slopes.push(
            (0..n)
                .map(|j| SlopePair { right: (ahead[j] - centre[j]) / h, left: (centre[j] - behind[j]) / h })
                .collect::<Vec<_>>(),
        );
    }
    let k = step_sizes.len();
    let (h1, h2) = (step_sizes[k - 2], step_sizes[k - 1]);
    let component_jumps: Vec<f64> = (0..n)
        .map(|j| {
            let j1 = slopes[k - 2][j].right - slopes[k - 2][j].left;
            let j2 = slopes[k - 1][j].right - slopes[k - 1][j].left;
            (h1 * j2 - h2 * j1) / (h1 - h2)
        })
        .collect();
    let estimated_jump = component_jumps.iter().fold(0.0_f64, |m, j| m.max(libm::fabs(*j)));
    Ok(JacobianJumpReport {
        probe_point: probe.to_vec(),
        axis,
        step_sizes: step_sizes.to_vec(),
        one_sided_slopes: slopes,
        component_jumps,
        estimated_jump,
        tolerances: Tolerances::of(chart),
        chart_fingerprint: fingerprint_hex(chart),
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InteriorRadiusAudit {
    pub points: usize,
    pub perturbations_per_point: usize,
    pub min_radius: f64,
    /// Perturbed images whose `φ⁻¹` fell outside `W₁`.
    pub failures: usize,
    /// Largest `‖φ⁻¹(w)‖ / r₂` over accepted perturbations.
    pub max_preimage_fraction: f64,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub chart_fingerprint: String,
}

/// For `points` random `x ∈ W₁`, draws `perturbations` points `w` with
/// `‖w − φ(x)‖ < s₄(x)` and checks `φ⁻¹(w) ∈ W₁`.
pub fn interior_radius_audit(
    chart: &FlowBoxChart,
    points: usize,
    perturbations: usize,
    seed: u64,
) -> Result<InteriorRadiusAudit, VerifyError> {
    let n = chart.dimension();
    let mut rng = SampleRng::stream(seed, 6);
    let mut report = InteriorRadiusAudit {
        points,
        perturbations_per_point: perturbations,
        min_radius: f64::INFINITY,
        failures: 0,
        max_preimage_fraction: 0.0,
        seed,
        tolerances: Tolerances::of(chart),
        chart_fingerprint: fingerprint_hex(chart),
    };
    for _ in 0..points {
        let x = rng.in_ball(&origin(n), chart.r2());
        let c = chart.crossing(&x)?;
        let s4 = chart.interior_radius_from(&x, &c);
        report.min_radius = report.min_radius.min(s4);
        let image = linalg::axpy(&c.p_x, c.t_x, chart.z());
        for _ in 0..perturbations {
            let w = rng.in_ball(&image, s4);
            match chart.phi_inverse(&w) {
                Ok(u) => {
                    report.max_preimage_fraction = report.max_preimage_fraction.max(linalg::norm(&u) / chart.r2())
                }
                Err(ChartError::NotInImage { .. }) => report.failures += 1,
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PiecewiseConjugacyReport {
    pub base_point: f64,
    pub samples: usize,
    /// `max |φ(F(x, t)) − φ(x) − t|` with exact flow and straightening.
    pub max_residual: f64,
    pub interval: (f64, f64),
    pub t_max: f64,
    pub seed: u64,
}

/// Conjugacy of a piecewise constant 1-D field to unit translation through
/// `φ(x) = ∫_{x₁}^{x} ds/f(s)`, using the closed-form flow.
pub fn piecewise_conjugacy_check(
    field: &PiecewiseConstant1d,
    base_point: f64,
    interval: (f64, f64),
    t_max: f64,
    samples: usize,
    seed: u64,
) -> PiecewiseConjugacyReport {
    let mut rng = SampleRng::stream(seed, 7);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let x = rng.uniform(interval.0, interval.1);
        let t = rng.uniform(-t_max, t_max);
        let moved = field.flow(x, t);
        let residual = field.straighten(base_point, moved) - field.straighten(base_point, x) - t;
        worst = worst.max(libm::fabs(residual));
    }
    PiecewiseConjugacyReport { base_point, samples, max_residual: worst, interval, t_max, seed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::flowbox::{build_chart, ChartConfig};

    #[test]
    fn conjugacy_on_abs_shear() {
        let chart = build_chart(&builtin::abs_shear(), &[0.0, 0.0]).unwrap();
        let r = verify_conjugacy(&chart, 50, chart.t() / 2.0, 0).unwrap();
        assert_eq!(r.samples, 50);
        assert_eq!(r.per_sample.len(), 50);
        assert!(r.max_conjugacy_residual <= 1e-6, "{r:?}");
        assert!(r.max_roundtrip_residual <= 1e-7);
        assert!(r.rejected as f64 <= 0.5 * r.attempts as f64);
    }

    #[test]
    fn conjugacy_rejects_long_times() {
        let chart = build_chart(&builtin::constant_e1(), &[0.0, 0.0]).unwrap();
        assert!(matches!(verify_conjugacy(&chart, 10, chart.t(), 0), Err(VerifyError::InvalidArgument(_))));
    }

    #[test]
    fn constant_chart_scan_is_isometric() {
        let chart = build_chart(&builtin::constant_e1(), &[0.0, 0.0]).unwrap();
        let r = lipschitz_ratio_scan(&chart, 200, 0).unwrap();
        assert!((r.max_ratio_phi - 1.0).abs() < 1e-9, "{}", r.max_ratio_phi);
        assert_eq!((r.bound_phi, r.bound_phi_inv, r.violations), (7.0, 4.0, 0));
    }

    #[test]
    fn linear_growth_dependence_is_sharp() {
        let cfg = DependenceConfig {
            k: 1.0,
            k_exact: true,
            center: vec![0.0],
            radius: 1.0,
            pair_count: 100,
            t_min: 0.2,
            t_max: 0.2,
            seed: 0,
            tolerance: 1e-12,
        };
        let r = dependence_audit(&builtin::linear_growth(), &cfg).unwrap();
        assert!((r.max_ratio - 1.0).abs() < 1e-6 && (r.min_ratio - 1.0).abs() < 1e-6, "{r:?}");
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn flow_axioms_on_exp_shear() {
        let r = flow_axioms_check(&builtin::exp_shear(), &[0.0, 0.0], 1.0, 0.2, 50, 0, 1e-10).unwrap();
        assert_eq!(r.max_identity_residual, 0.0);
        assert!(r.max_semigroup_residual <= 1e-7);
    }

    #[test]
    fn kink_of_abs_shear_chart() {
        let chart = build_chart(&builtin::abs_shear(), &[0.0, 0.0]).unwrap();
        let steps = [1e-2, 1e-3, 1e-4, 1e-5];
        let r = nonsmoothness_probe(&chart, &[0.05, 0.0], 1, &steps).unwrap();
        assert!((r.estimated_jump - 0.1).abs() < 1e-3, "{r:?}");
        let s = &r.one_sided_slopes[3][0];
        assert!((s.right + 0.05).abs() < 1e-3 && (s.left - 0.05).abs() < 1e-3);
        let flat = nonsmoothness_probe(&chart, &[0.0, 0.0], 1, &steps).unwrap();
        assert!(flat.estimated_jump <= 1e-6);
        assert!(nonsmoothness_probe(&chart, &[0.05, 0.0], 1, &[1e-4, 1e-3]).is_err());
    }

    #[test]
    fn smooth_chart_has_no_jump() {
        let config = ChartConfig { integration_tolerance: 1e-13, crossing_tolerance: 1e-14, ..ChartConfig::default() };
        let chart = FlowBoxChart::build(&builtin::exp_shear(), &[0.0, 0.0], config).unwrap();
        let r = nonsmoothness_probe(&chart, &[0.01, 0.01], 1, &[1e-2, 1e-3, 1e-4, 1e-5]).unwrap();
        assert!(r.estimated_jump <= 1e-6, "{r:?}");
    }

    #[test]
    fn interior_radius_holds_on_constant_chart() {
        let chart = build_chart(&builtin::constant_e1(), &[0.0, 0.0]).unwrap();
        let r = interior_radius_audit(&chart, 5, 20, 0).unwrap();
        assert_eq!(r.failures, 0);
        assert!(r.max_preimage_fraction < 1.0);
    }

    #[test]
    fn step_field_conjugacy_is_exact() {
        let crate::field::Regularity::PiecewiseConstant(p) = builtin::step_field().regularity().clone() else {
            panic!("step field must be piecewise constant")
        };
        let r = piecewise_conjugacy_check(&p, 0.0, (-2.0, 3.0), 1.0, 500, 0);
        assert!(r.max_residual <= 1e-14, "{r:?}");
    }
}
