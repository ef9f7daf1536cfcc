//! Dormand–Prince 5(4) with per-step error control.

use alloc::vec;
use alloc::vec::Vec;

use super::IntegrateError;
use crate::field::VectorField;
use crate::linalg;

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 1_000_000;
const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Status {
    Completed,
    /// The step callback asked to stop.
    Stopped,
    /// The last accepted state left the field's domain ball.
    ExitedDomain,
}

pub(crate) struct Advance {
    pub t: f64,
    pub y: Vec<f64>,
    pub status: Status,
}

fn error_norm(err: &[f64], y0: &[f64], y1: &[f64], tol: f64) -> f64 {
    let n = err.len() as f64;
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = tol + tol * libm::fmax(libm::fabs(*a), libm::fabs(*b));
            (e / sc) * (e / sc)
        })
        .sum();
    libm::sqrt(sum / n)
}

fn rms_scaled(v: &[f64], y: &[f64], tol: f64) -> f64 {
    error_norm(v, y, y, tol)
}

/// Integrates `y' = f(y)` from `(t0, y0)` to `t_end`. `on_accept` sees every
/// accepted `(t, y)` and returns `false` to stop early. The time `t_end` is
/// hit exactly; `t_end == t0` returns `y0` untouched.
pub(crate) fn advance<F>(
    field: &VectorField,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    tol: f64,
    mut on_accept: F,
) -> Result<Advance, IntegrateError>
where
    F: FnMut(f64, &[f64]) -> bool,
{
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    if t_end == t0 {
        return Ok(Advance { t, y, status: Status::Completed });
    }
    let direction = if t_end > t0 { 1.0 } else { -1.0 };
    let mut k: [Vec<f64>; 7] = core::array::from_fn(|_| vec![0.0; n]);
    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];

    field.eval_into(&y, &mut k[0])?;
    let mut h = direction * initial_step(field, &y, &k[0], tol, libm::fabs(t_end - t0))?;
    let mut rejected_last = false;

    for _ in 0..MAX_STEPS {
        let remaining = t_end - t;
        let last = libm::fabs(h) >= libm::fabs(remaining);
        if last {
            h = remaining;
        }
        if libm::fabs(h) <= 16.0 * f64::EPSILON * libm::fmax(libm::fabs(t), 1.0) && !last {
            return Err(IntegrateError::StepUnderflow { time: t });
        }

        for s in 1..7 {
            let (known, rest) = k.split_at_mut(s);
            for i in 0..n {
                let acc: f64 = known.iter().zip(&A[s]).map(|(kj, a)| a * kj[i]).sum();
                stage[i] = y[i] + h * acc;
            }
            field.eval_into(&stage, &mut rest[0])?;
        }
        // The seventh stage is evaluated at the 5th-order solution (FSAL).
        y_new.copy_from_slice(&stage);
        for i in 0..n {
            let mut acc = 0.0;
            for (j, e) in E.iter().enumerate() {
                acc += e * k[j][i];
            }
            err[i] = h * acc;
        }
        let e = error_norm(&err, &y, &y_new, tol);
        if !e.is_finite() {
            h *= MIN_FACTOR;
            rejected_last = true;
            continue;
        }

        if e <= 1.0 {
            t = if last { t_end } else { t + h };
            y.copy_from_slice(&y_new);
            let (first, rest) = k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]);

            if !field.contains(&y) {
                return Ok(Advance { t, y, status: Status::ExitedDomain });
            }
            if !on_accept(t, &y) {
                return Ok(Advance { t, y, status: Status::Stopped });
            }
            if last {
                return Ok(Advance { t, y, status: Status::Completed });
            }
            let mut factor = if e == 0.0 { MAX_FACTOR } else { SAFETY * libm::pow(e, -0.2) };
            factor = factor.clamp(MIN_FACTOR, MAX_FACTOR);
            if rejected_last {
                factor = factor.min(1.0);
            }
            h *= factor;
            rejected_last = false;
        } else {
            let factor = (SAFETY * libm::pow(e, -0.2)).clamp(MIN_FACTOR, 1.0);
            h *= factor;
            rejected_last = true;
        }
    }
    Err(IntegrateError::StepUnderflow { time: t })
}

/// Starting step size after Hairer, Nørsett & Wanner.
fn initial_step(field: &VectorField, y: &[f64], f0: &[f64], tol: f64, span: f64) -> Result<f64, IntegrateError> {
    let d0 = rms_scaled(y, y, tol);
    let d1 = rms_scaled(f0, y, tol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1 = linalg::axpy(y, h0, f0);
    let mut f1 = vec![0.0; y.len()];
    field.eval_into(&y1, &mut f1)?;
    let d2 = rms_scaled(&linalg::sub(&f1, f0), y, tol) / h0;
    let h1 = if libm::fmax(d1, d2) <= 1e-15 {
        libm::fmax(1e-6, h0 * 1e-3)
    } else {
        libm::pow(0.01 / libm::fmax(d1, d2), 0.2)
    };
    Ok(libm::fmin(100.0 * h0, h1).min(span))
}
