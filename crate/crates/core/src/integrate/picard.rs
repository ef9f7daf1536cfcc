//! Successive approximations `σ⁰ ≡ x₀`, `σᵏ⁺¹(t) = x₀ + ∫₀ᵗ f(σᵏ(s)) ds` on a
//! uniform grid with composite-trapezoid quadrature.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_start, existence_interval, IntegrateError, Method, Trajectory};
use crate::estimate;
use crate::field::VectorField;
use crate::linalg;

const ESTIMATE_SAMPLES: usize = 2000;

#[derive(Clone, Debug, PartialEq)]
pub struct PicardSolution {
    /// Final iterate; its `tolerance` is the last successive sup distance.
    pub trajectory: Trajectory,
    /// `sup_t ‖σᵏ⁺¹(t) − σᵏ(t)‖` for each iteration.
    pub successive_distances: Vec<f64>,
    pub lipschitz: f64,
    pub speed_bound: f64,
}

pub fn picard_solve(
    field: &VectorField,
    x0: &[f64],
    t_end: f64,
    iterations: usize,
    grid_points: usize,
) -> Result<PicardSolution, IntegrateError> {
    check_start(field, x0, 1.0)?;
    if iterations == 0 || grid_points < 2 || t_end == 0.0 || !t_end.is_finite() {
        return Err(IntegrateError::InvalidArgument(
            "Picard iteration needs iterations >= 1, grid_points >= 2 and a nonzero finite end time",
        ));
    }
    let (k, m) = constants(field)?;
    let r = field.domain_radius() - linalg::distance(x0, field.domain_center());
    let half_width = existence_interval(r, m)?.half_width;
    if libm::fabs(t_end) >= half_width {
        return Err(IntegrateError::BeyondExistence { requested: t_end, half_width });
    }
    let product = k * libm::fabs(t_end);
    if product >= 1.0 {
        return Err(IntegrateError::Contraction { product });
    }

    let n = x0.len();
    let h = t_end / (grid_points - 1) as f64;
    let times: Vec<f64> = (0..grid_points).map(|j| j as f64 * h).collect();
    let mut current = vec![x0.to_vec(); grid_points];
    let mut next = current.clone();
    let mut rates = vec![vec![0.0; n]; grid_points];
    let mut successive_distances = Vec::with_capacity(iterations);

    for _ in 0..iterations {
        for (state, rate) in current.iter().zip(rates.iter_mut()) {
            field.eval_into(state, rate)?;
        }
        next[0].copy_from_slice(x0);
        for j in 1..grid_points {
            for i in 0..n {
                next[j][i] = next[j - 1][i] + 0.5 * h * (rates[j - 1][i] + rates[j][i]);
            }
        }
        let mut sup = 0.0_f64;
        for (j, (a, b)) in next.iter().zip(&current).enumerate() {
            if !field.contains(a) {
                return Err(IntegrateError::LeftDomain { time: times[j] });
            }
            sup = sup.max(linalg::distance(a, b));
        }
        successive_distances.push(sup);
        core::mem::swap(&mut current, &mut next);
    }

    let tolerance = *successive_distances.last().expect("at least one iteration");
    Ok(PicardSolution {
        trajectory: Trajectory { times, states: current, tolerance, method: Method::Picard, exited_domain: false },
        successive_distances,
        lipschitz: k,
        speed_bound: m,
    })
}

/// Known constants, or sampled estimates on the whole domain ball.
fn constants(field: &VectorField) -> Result<(f64, f64), IntegrateError> {
    if let (Some(k), Some(m)) = (field.known_lipschitz(), field.known_speed_bound()) {
        return Ok((k, m));
    }
    let est = estimate::estimate(field, field.domain_center(), field.domain_radius(), ESTIMATE_SAMPLES, 0)?;
    Ok((est.lipschitz_k, est.speed_m))
}
