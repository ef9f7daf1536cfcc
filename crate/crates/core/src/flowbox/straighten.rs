//! One-dimensional straightening `φ(x) = ∫_{x₁}^{x} ds / f(s)`.

use alloc::vec::Vec;

use super::ChartError;
use crate::field::{Regularity, VectorField};

const SIGN_PROBES: usize = 256;
const MAX_DEPTH: usize = 48;

/// Exact for piecewise constant fields; adaptive Simpson quadrature to
/// `tolerance` otherwise. `f` must keep one sign on the path, checked on
/// evenly spaced probes.
pub fn straighten_1d(field: &VectorField, x1: f64, x: f64, tolerance: f64) -> Result<f64, ChartError> {
    if field.dimension() != 1 {
        return Err(ChartError::DimensionMismatch { expected: 1, found: field.dimension() });
    }
    if !(tolerance > 0.0) {
        return Err(ChartError::InvalidParameters("tolerance must be positive"));
    }
    if let Regularity::PiecewiseConstant(pieces) = field.regularity() {
        field.eval(&[x1])?;
        field.eval(&[x])?;
        return Ok(pieces.straighten(x1, x));
    }
    if x == x1 {
        return Ok(0.0);
    }
    let eval = |s: f64| -> Result<f64, ChartError> { Ok(field.eval(&[s])?[0]) };

    let (lo, hi) = (x1.min(x), x1.max(x));
    let mut sign = 0.0;
    for k in 0..=SIGN_PROBES {
        let s = lo + (hi - lo) * k as f64 / SIGN_PROBES as f64;
        let v = eval(s)?;
        if v == 0.0 || (sign != 0.0 && (v > 0.0) != (sign > 0.0)) {
            return Err(ChartError::EquilibriumInPath { at: s });
        }
        sign = v;
    }

    let g = |s: f64| eval(s).map(|v| 1.0 / v);
    let (fa, fm, fb) = (g(x1)?, g(0.5 * (x1 + x))?, g(x)?);
    let whole = simpson(x1, x, fa, fm, fb);
    // Explicit stack of (a, b, f(a), f(mid), f(b), whole, tolerance, depth).
    let mut stack: Vec<(f64, f64, f64, f64, f64, f64, f64, usize)> = Vec::new();
    stack.push((x1, x, fa, fm, fb, whole, tolerance, 0));
    let mut total = 0.0;
    while let Some((a, b, fa, fm, fb, whole, tol, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (g(lm)?, g(rm)?);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if depth >= MAX_DEPTH || libm::fabs(delta) <= 15.0 * tol {
            total += left + right + delta / 15.0;
        } else {
            stack.push((m, b, fm, frm, fb, right, 0.5 * tol, depth + 1));
            stack.push((a, m, fa, flm, fm, left, 0.5 * tol, depth + 1));
        }
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}
