//! Solutions `σ_x` of `x' = f(x)`: Picard iteration, an adaptive
//! Dormand–Prince integrator, the local flow `F(x, t)` and the monotone
//! hyperplane crossing solver.

mod crossing;
mod picard;
mod rk;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub use crossing::{crossing_time, CrossingOptions, CrossingResult};
pub use picard::{picard_solve, PicardSolution};

use crate::field::{FieldError, PiecewiseConstant1d, VectorField};
use crate::linalg;

#[derive(Clone, Debug, PartialEq)]
pub enum IntegrateError {
    Field(FieldError),
    /// The field is not Lipschitz; only closed-form routines apply.
    NotLipschitz,
    InvalidArgument(&'static str),
    BeyondExistence { requested: f64, half_width: f64 },
    /// `K·|t|` must stay below one for Picard iteration to contract.
    Contraction { product: f64 },
    LeftDomain { time: f64 },
    StepUnderflow { time: f64 },
    /// No sign change of `χ∘σ_x` within `(−T, T)`.
    NoBracket { horizon: f64 },
    CrossingNotConverged { residual: f64 },
}

impl fmt::Display for IntegrateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegrateError::Field(e) => write!(f, "{e}"),
            IntegrateError::NotLipschitz => f.write_str("field is not Lipschitz; the generic solvers refuse it"),
            IntegrateError::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            IntegrateError::BeyondExistence { requested, half_width } => write!(
                f,
                "time {requested} lies outside the guaranteed existence interval (-{half_width}, {half_width})"
            ),
            IntegrateError::Contraction { product } => {
                write!(f, "Picard iteration needs K*|t| < 1, got {product}")
            }
            IntegrateError::LeftDomain { time } => write!(f, "solution left the domain ball at t = {time}"),
            IntegrateError::StepUnderflow { time } => write!(f, "step size underflow at t = {time}"),
            IntegrateError::NoBracket { horizon } => {
                write!(f, "no crossing of the section within |t| < {horizon}")
            }
            IntegrateError::CrossingNotConverged { residual } => {
                write!(f, "crossing solver stopped with residual {residual}")
            }
        }
    }
}

impl core::error::Error for IntegrateError {}

impl From<FieldError> for IntegrateError {
    fn from(e: FieldError) -> Self {
        IntegrateError::Field(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Method {
    Picard,
    AdaptiveRk,
    /// Exact flow of a piecewise constant 1-D field.
    ClosedForm,
}

/// Time-stamped solution samples. Times are strictly monotone in the
/// direction of integration and start at the initial time.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub tolerance: f64,
    pub method: Method,
    /// Set when integration stopped early because the solution left the
    /// field's domain ball; the last state is the first one outside.
    pub exited_domain: bool,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectories hold at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectories hold at least the initial time")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExistenceInterval {
    pub half_width: f64,
}

/// Solutions starting at the center of a ball of radius `r` on which
/// `‖f‖ ≤ M` exist on `(−r/M, r/M)`.
pub fn existence_interval(r: f64, m: f64) -> Result<ExistenceInterval, IntegrateError> {
    if !(r > 0.0) || !(m > 0.0) {
        return Err(IntegrateError::InvalidArgument("existence interval needs r > 0 and M > 0"));
    }
    Ok(ExistenceInterval { half_width: r / m })
}

/// Continuous dependence envelope `distance · e^{K|t|}`.
pub fn dependence_bound(k: f64, distance: f64, t: f64) -> f64 {
    distance * libm::exp(k * libm::fabs(t))
}

fn check_start(field: &VectorField, x0: &[f64], tolerance: f64) -> Result<(), IntegrateError> {
    if !field.is_lipschitz() {
        return Err(IntegrateError::NotLipschitz);
    }
    if !(tolerance > 0.0) {
        return Err(IntegrateError::InvalidArgument("tolerance must be positive"));
    }
    field.check_dimension(x0)?;
    if !linalg::is_finite(x0) || !field.contains(x0) {
        return Err(FieldError::OutOfDomain {
            distance: linalg::distance(x0, field.domain_center()),
            radius: field.domain_radius(),
        }
        .into());
    }
    Ok(())
}

/// When the field carries a speed bound, rejects times beyond the
/// guaranteed existence interval of the largest ball around `x0` inside the
/// domain.
fn check_existence(field: &VectorField, x0: &[f64], t: f64) -> Result<(), IntegrateError> {
    let Some(m) = field.known_speed_bound() else { return Ok(()) };
    let r = field.domain_radius() - linalg::distance(x0, field.domain_center());
    if r <= 0.0 {
        return Err(IntegrateError::BeyondExistence { requested: t, half_width: 0.0 });
    }
    let half_width = existence_interval(r, m)?.half_width;
    if libm::fabs(t) >= half_width {
        return Err(IntegrateError::BeyondExistence { requested: t, half_width });
    }
    Ok(())
}

/// Adaptive integration from `x0` at time 0 to `t_target`, recording every
/// accepted step. Leaving the domain ball truncates the trajectory and sets
/// [`Trajectory::exited_domain`].
pub fn integrate(
    field: &VectorField,
    x0: &[f64],
    t_target: f64,
    tolerance: f64,
) -> Result<Trajectory, IntegrateError> {
    check_start(field, x0, tolerance)?;
    check_existence(field, x0, t_target)?;
    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let out = rk::advance(field, 0.0, x0, t_target, tolerance, |t, y| {
        times.push(t);
        states.push(y.to_vec());
        true
    })?;
    let exited_domain = out.status == rk::Status::ExitedDomain;
    if exited_domain {
        times.push(out.t);
        states.push(out.y);
    }
    Ok(Trajectory { times, states, tolerance, method: Method::AdaptiveRk, exited_domain })
}

/// The local flow `F(x, t)`. `F(x, 0)` returns `x` without integrating.
pub fn local_flow(field: &VectorField, x: &[f64], t: f64, tolerance: f64) -> Result<Vec<f64>, IntegrateError> {
    check_start(field, x, tolerance)?;
    if t == 0.0 {
        return Ok(x.to_vec());
    }
    check_existence(field, x, t)?;
    let out = rk::advance(field, 0.0, x, t, tolerance, |_, _| true)?;
    match out.status {
        rk::Status::ExitedDomain => Err(IntegrateError::LeftDomain { time: out.t }),
        _ => Ok(out.y),
    }
}

/// Samples the exact flow of a piecewise constant 1-D field at `samples`
/// evenly spaced times from 0 to `t_target`.
pub fn piecewise_trajectory(field: &PiecewiseConstant1d, x0: f64, t_target: f64, samples: usize) -> Trajectory {
    let k = samples.max(2);
    let times: Vec<f64> = (0..k).map(|i| t_target * i as f64 / (k - 1) as f64).collect();
    let states = times.iter().map(|t| vec![field.flow(x0, *t)]).collect();
    Trajectory { times, states, tolerance: 0.0, method: Method::ClosedForm, exited_domain: false }
}
