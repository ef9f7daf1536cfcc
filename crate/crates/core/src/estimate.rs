//! Sampled estimates of the Lipschitz constant `K` and speed bound `M` of a
//! field on a ball.
//!
//! Uniform random pairs are drawn from the ball. Whenever a pair (or point)
//! sets a new running maximum it is refined locally with a few perturbed
//! candidates drawn from a stream keyed by the pair index, so a run with more
//! samples replays every refinement of a shorter run with the same seed and
//! the raw maxima are monotone in the sample count. Sampled maxima undershoot
//! suprema, hence the reported constants are the raw maxima times
//! [`SAFETY_FACTOR`]; known constants of the field override the estimate.

use alloc::vec::Vec;

use crate::field::{FieldError, VectorField};
use crate::linalg;
use crate::rng::SampleRng;

pub const SAFETY_FACTOR: f64 = 1.1;

const REFINE_ROUNDS: usize = 4;
const REFINE_CANDIDATES: usize = 6;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FieldEstimates {
    /// Reported Lipschitz constant: known value, or raw maximum × safety factor.
    pub lipschitz_k: f64,
    /// Reported speed bound: known value, or raw maximum × safety factor.
    pub speed_m: f64,
    pub raw_lipschitz: f64,
    pub raw_speed: f64,
    pub lipschitz_exact: bool,
    pub speed_exact: bool,
    pub safety_factor: f64,
    pub ball_center: Vec<f64>,
    pub ball_radius: f64,
    pub sample_count: usize,
    pub rng_seed: u64,
}

/// Samples `samples` pairs in `B(center, radius)`; see the module docs.
pub fn estimate(
    field: &VectorField,
    center: &[f64],
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<FieldEstimates, FieldError> {
    field.check_dimension(center)?;
    if !(radius > 0.0) || !field.contains_ball(center, radius) {
        return Err(FieldError::InvalidBall);
    }
    if samples < 2 {
        return Err(FieldError::DegenerateSampling);
    }
    let inside = |p: &[f64]| linalg::distance(p, center) < radius;
    let mut rng = SampleRng::stream(seed, 0);
    let mut best_ratio = 0.0_f64;
    let mut best_speed = 0.0_f64;
    let mut separated = 0usize;

    for i in 0..samples {
        let p = rng.in_ball(center, radius);
        let q = rng.in_ball(center, radius);
        let fp = field.eval(&p)?;
        let fq = field.eval(&q)?;

        let (top, ftop) = if linalg::norm(&fp) >= linalg::norm(&fq) { (&p, &fp) } else { (&q, &fq) };
        let speed = linalg::norm(ftop);
        if speed > best_speed {
            best_speed = speed;
            let mut local = SampleRng::stream(seed, 2 * i as u64 + 1);
            let mut anchor = top.clone();
            let mut step = 0.1 * radius;
            for _ in 0..REFINE_ROUNDS {
                for _ in 0..REFINE_CANDIDATES {
                    let cand = local.in_ball(&anchor, step);
                    if !inside(&cand) {
                        continue;
                    }
                    let s = linalg::norm(&field.eval(&cand)?);
                    if s > best_speed {
                        best_speed = s;
                        anchor = cand;
                    }
                }
                step *= 0.5;
            }
        }

        let d = linalg::distance(&p, &q);
        if d == 0.0 {
            continue;
        }
        separated += 1;
        let ratio = linalg::distance(&fp, &fq) / d;
        if ratio > best_ratio {
            best_ratio = ratio;
            let mut local = SampleRng::stream(seed, 2 * i as u64 + 2);
            let (mut a, mut b) = (p.clone(), q.clone());
            let mut step = 0.25 * d;
            for _ in 0..REFINE_ROUNDS {
                for _ in 0..REFINE_CANDIDATES {
                    let ca = local.in_ball(&a, step);
                    let cb = local.in_ball(&b, step);
                    let dc = linalg::distance(&ca, &cb);
                    if !inside(&ca) || !inside(&cb) || dc == 0.0 {
                        continue;
                    }
                    let r = linalg::distance(&field.eval(&ca)?, &field.eval(&cb)?) / dc;
                    if r > best_ratio {
                        best_ratio = r;
                        a = ca;
                        b = cb;
                    }
                }
                step *= 0.5;
            }
        }
    }
    if separated == 0 {
        return Err(FieldError::DegenerateSampling);
    }

    let (lipschitz_k, lipschitz_exact) = match field.known_lipschitz() {
        Some(k) => (k, true),
        None => (best_ratio * SAFETY_FACTOR, false),
    };
    let (speed_m, speed_exact) = match field.known_speed_bound() {
        Some(m) => (m, true),
        None => (best_speed * SAFETY_FACTOR, false),
    };
    Ok(FieldEstimates {
        lipschitz_k,
        speed_m,
        raw_lipschitz: best_ratio,
        raw_speed: best_speed,
        lipschitz_exact,
        speed_exact,
        safety_factor: SAFETY_FACTOR,
        ball_center: center.to_vec(),
        ball_radius: radius,
        sample_count: samples,
        rng_seed: seed,
    })
}

/// Lipschitz-focused entry point; `samples` is the number of random pairs.
pub fn estimate_lipschitz(
    field: &VectorField,
    center: &[f64],
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<FieldEstimates, FieldError> {
    estimate(field, center, radius, samples, seed)
}

/// Speed-focused entry point; evaluates `2·samples` points.
pub fn estimate_speed_bound(
    field: &VectorField,
    center: &[f64],
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<FieldEstimates, FieldError> {
    estimate(field, center, radius, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn tripling() -> VectorField {
        VectorField::from_fn(2, "3x", 2.0, |x, out| {
            out[0] = 3.0 * x[0];
            out[1] = 3.0 * x[1];
        })
    }

    #[test]
    fn linear_field_ratio_is_exact() {
        let est = estimate_lipschitz(&tripling(), &[0.0, 0.0], 1.0, 10_000, 0).unwrap();
        assert!((est.raw_lipschitz - 3.0).abs() < 1e-12, "{}", est.raw_lipschitz);
        assert!((est.lipschitz_k - 3.3).abs() < 1e-11);
        assert!(!est.lipschitz_exact);
        assert!(est.raw_speed < 3.0 && est.raw_speed > 2.9, "{}", est.raw_speed);
    }

    #[test]
    fn constant_field_has_zero_ratio() {
        let f = VectorField::from_fn(2, "c", 2.0, |_, out| out.copy_from_slice(&[0.0, 1.0]));
        let est = estimate(&f, &[0.0, 0.0], 1.0, 500, 3).unwrap();
        assert_eq!(est.raw_lipschitz, 0.0);
        assert_eq!(est.lipschitz_k, 0.0);
        assert_eq!(est.raw_speed, 1.0);
    }

    #[test]
    fn abs_shear_estimates() {
        let f = builtin::abs_shear();
        let est = estimate(&f, &[0.0, 0.0], 1.0, 10_000, 0).unwrap();
        assert!(est.raw_lipschitz <= 1.0 + 1e-12 && est.raw_lipschitz > 0.99, "{}", est.raw_lipschitz);
        assert!((1.9..=2.0).contains(&est.raw_speed), "{}", est.raw_speed);
        assert_eq!(est.lipschitz_k, 1.0);
        assert!(est.lipschitz_exact);
        assert!(est.raw_speed <= f.known_speed_bound().unwrap());
    }

    #[test]
    fn more_samples_never_lower_the_maxima() {
        let f = builtin::exp_shear();
        let mut last = (0.0, 0.0);
        for n in [2, 10, 50, 200, 1000] {
            let est = estimate(&f, &[0.5, 0.5], 1.5, n, 42).unwrap();
            assert!(est.raw_lipschitz >= last.0 && est.raw_speed >= last.1);
            last = (est.raw_lipschitz, est.raw_speed);
        }
    }

    #[test]
    fn rejects_ball_outside_domain_and_too_few_samples() {
        let f = builtin::abs_shear();
        assert_eq!(estimate(&f, &[3.5, 0.0], 1.0, 10, 0), Err(FieldError::InvalidBall));
        assert_eq!(estimate(&f, &[0.0, 0.0], 1.0, 1, 0), Err(FieldError::DegenerateSampling));
    }
}
