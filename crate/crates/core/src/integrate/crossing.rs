//! Crossing of the section `Π = {χ = 0}`.
//!
//! Along a solution through `x`, `g(s) = χ(σ_x(s))` has slope
//! `χ(f(σ_x(s))) > 1/2` inside a chart, so it has exactly one root `s* = −t_x`
//! in `(−T, T)`. The solver integrates from `x` towards the root until `g`
//! changes sign, which brackets it within a single accepted step, then
//! refines with safeguarded Newton iterations (bisection when Newton leaves
//! the bracket), using the exact derivative `χ(f(σ_x(s)))`.

use alloc::vec;
use alloc::vec::Vec;

use super::rk::{self, Status};
use super::{check_start, IntegrateError};
use crate::field::VectorField;
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingOptions {
    /// Required `|χ(p_x)|`.
    pub tolerance: f64,
    pub integration_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        CrossingOptions { tolerance: 1e-10, integration_tolerance: 1e-9, max_iterations: 100 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossingResult {
    /// Time to flow from the section to `x`: `σ_x(−t_x) = p_x`.
    pub t_x: f64,
    /// Foot point on the section.
    pub p_x: Vec<f64>,
    /// `|χ(p_x)|`.
    pub chi_residual: f64,
    /// Times `s` (along `σ_x`) of the integrator step that bracketed the root.
    pub bracket: (f64, f64),
    /// `χ(σ_x(s))` at the bracket ends; they straddle zero.
    pub bracket_values: (f64, f64),
    pub iterations: usize,
}

impl CrossingResult {
    /// Secant slope of `χ∘σ_x` across the bracket, or the exact slope
    /// `χ(f(x))` when `x` already lies on the section.
    pub fn secant_slope(&self, field: &VectorField, chi: &[f64]) -> f64 {
        let (a, b) = self.bracket;
        if a == b {
            let mut v = vec![0.0; chi.len()];
            return match field.eval_into(&self.p_x, &mut v) {
                Ok(()) => linalg::dot(chi, &v),
                Err(_) => f64::NAN,
            };
        }
        (self.bracket_values.1 - self.bracket_values.0) / (b - a)
    }
}

/// Finds the unique `t_x ∈ (−horizon, horizon)` with `χ(σ_x(−t_x)) = 0`.
pub fn crossing_time(
    field: &VectorField,
    x: &[f64],
    chi: &[f64],
    horizon: f64,
    options: &CrossingOptions,
) -> Result<CrossingResult, IntegrateError> {
    check_start(field, x, options.integration_tolerance)?;
    if chi.len() != x.len() || !(horizon > 0.0) || !(options.tolerance > 0.0) {
        return Err(IntegrateError::InvalidArgument("crossing needs a matching functional, horizon > 0, tolerance > 0"));
    }
    let g0 = linalg::dot(chi, x);
    if g0 == 0.0 {
        return Ok(CrossingResult {
            t_x: 0.0,
            p_x: x.to_vec(),
            chi_residual: 0.0,
            bracket: (0.0, 0.0),
            bracket_values: (0.0, 0.0),
            iterations: 0,
        });
    }

    // Increasing g: the root lies at negative s when g(0) > 0.
    let target = if g0 > 0.0 { -horizon } else { horizon };
    let tol = options.integration_tolerance;
    let mut lo = (0.0, x.to_vec(), g0);
    let mut hi: Option<(f64, Vec<f64>, f64)> = None;
    let scan = rk::advance(field, 0.0, x, target, tol, |s, y| {
        let g = linalg::dot(chi, y);
        if g * g0 <= 0.0 {
            hi = Some((s, y.to_vec(), g));
            false
        } else {
            lo = (s, y.to_vec(), g);
            true
        }
    })?;
    let Some(hi) = hi else {
        return Err(match scan.status {
            Status::ExitedDomain => IntegrateError::LeftDomain { time: scan.t },
            _ => IntegrateError::NoBracket { horizon },
        });
    };
    if libm::fabs(hi.0) >= horizon {
        return Err(IntegrateError::NoBracket { horizon });
    }
    let bracket = (lo.0, hi.0);
    let bracket_values = (lo.2, hi.2);
    let finish = |s: f64, p: Vec<f64>, g: f64, iterations| CrossingResult {
        t_x: -s,
        p_x: p,
        chi_residual: libm::fabs(g),
        bracket,
        bracket_values,
        iterations,
    };
    if hi.2 == 0.0 {
        return Ok(finish(hi.0, hi.1, 0.0, 0));
    }

    // `a` keeps the sign of g0 and carries its state; `b` has the other sign.
    let (mut a, mut ya, mut ga) = lo;
    let mut b = hi.0;
    let mut s = a - ga * (b - a) / (hi.2 - ga);
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    let mut polish = 0;
    let mut iterations = 0;
    let mut rate = vec![0.0; x.len()];

    for iteration in 1..=options.max_iterations {
        iterations = iteration;
        if !(s > a.min(b) && s < a.max(b)) {
            s = 0.5 * (a + b);
        }
        let step = rk::advance(field, a, &ya, s, tol, |_, _| true)?;
        if step.status == Status::ExitedDomain {
            return Err(IntegrateError::LeftDomain { time: step.t });
        }
        let y = step.y;
        let g = linalg::dot(chi, &y);
        if best.as_ref().is_none_or(|(_, _, gb)| libm::fabs(g) < libm::fabs(*gb)) {
            best = Some((s, y.clone(), g));
        }
        if g == 0.0 {
            return Ok(finish(s, y, g, iteration));
        }
        field.eval_into(&y, &mut rate)?;
        let slope = linalg::dot(chi, &rate);
        let newton = s - g / slope;
        if (g > 0.0) == (ga > 0.0) {
            a = s;
            ya = y;
            ga = g;
        } else {
            b = s;
        }
        if libm::fabs(g) <= options.tolerance {
            polish += 1;
            let tiny = 4.0 * f64::EPSILON * libm::fmax(libm::fabs(s), 1e-300);
            if polish >= 3 || libm::fabs(newton - s) <= tiny || libm::fabs(b - a) <= tiny {
                break;
            }
        }
        s = if slope > 0.0 && newton.is_finite() { newton } else { 0.5 * (a + b) };
    }

    let (s, p, g) = best.expect("at least one iteration ran");
    if libm::fabs(g) > options.tolerance {
        return Err(IntegrateError::CrossingNotConverged { residual: libm::fabs(g) });
    }
    Ok(finish(s, p, g, iterations))
}
