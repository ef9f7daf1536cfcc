//! Search for the working radius `r₁` on which the normalized field is
//! transverse to the section and slow: `χ(f̃) > 1/2` and `‖f̃‖ < 2`.

use alloc::vec::Vec;
use core::fmt;

use super::ChartError;
use crate::field::VectorField;
use crate::linalg;
use crate::rng::SampleRng;

/// Lower bound required of `χ∘f̃` before the margin.
pub const TRANSVERSALITY_BOUND: f64 = 0.5;
/// Upper bound required of `‖f̃‖` before the margin. Also the speed bound
/// `M` recorded in charts.
pub const SPEED_BOUND: f64 = 2.0;

const MAX_HALVINGS: usize = 60;
const REFINE_STEPS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RadiusFailure {
    /// The ball does not fit in the field domain.
    Domain,
    Transversality { min_chi_f: f64 },
    Speed { max_speed: f64 },
}

impl fmt::Display for RadiusFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusFailure::Domain => f.write_str("ball leaves the field domain"),
            RadiusFailure::Transversality { min_chi_f } => {
                write!(f, "chi(f) dropped to {min_chi_f}, below 1/2 plus margin")
            }
            RadiusFailure::Speed { max_speed } => write!(f, "|f| reached {max_speed}, above 2 minus margin"),
        }
    }
}

/// `r₁`, `T = r₁/4`, `r₂ = min{r₁/10, T/2}` plus the sampled extremes on
/// `B(0, r₁)`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Radii {
    pub r1: f64,
    pub t: f64,
    pub r2: f64,
    pub min_chi_f: f64,
    pub max_speed: f64,
    pub halvings: usize,
}

pub fn horizon_for(r1: f64) -> f64 {
    r1 / 4.0
}

pub fn inner_radius_for(r1: f64) -> f64 {
    libm::fmin(r1 / 10.0, horizon_for(r1) / 2.0)
}

/// Probe layout on the unit ball, scaled by the candidate radius: the
/// center, `±eᵢ`, half the budget on the unit sphere and the rest inside.
fn template(n: usize, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = SampleRng::stream(seed, 0x7261_6469_69);
    let origin = alloc::vec![0.0; n];
    let mut points = Vec::with_capacity(samples + 2 * n + 1);
    points.push(origin.clone());
    for i in 0..n {
        points.push(linalg::unit(n, i));
        points.push(linalg::scale(&linalg::unit(n, i), -1.0));
    }
    for k in 0..samples {
        points.push(if k % 2 == 0 { rng.on_sphere(&origin, 1.0) } else { rng.in_ball(&origin, 1.0) });
    }
    points
}

fn check(
    field: &VectorField,
    chi: &[f64],
    probes: &[Vec<f64>],
    r: f64,
    margin: f64,
) -> Result<(f64, f64), RadiusFailureOr> {
    let origin = alloc::vec![0.0; field.dimension()];
    if !field.contains_ball(&origin, r) {
        return Err(RadiusFailureOr::Failure(RadiusFailure::Domain));
    }
    let mut min_chi_f = f64::INFINITY;
    let mut max_speed = 0.0_f64;
    for p in probes {
        let v = field.eval(&linalg::scale(p, r)).map_err(RadiusFailureOr::Field)?;
        min_chi_f = min_chi_f.min(linalg::dot(chi, &v));
        max_speed = max_speed.max(linalg::norm(&v));
    }
    if min_chi_f < TRANSVERSALITY_BOUND + margin {
        return Err(RadiusFailureOr::Failure(RadiusFailure::Transversality { min_chi_f }));
    }
    if max_speed > SPEED_BOUND - margin {
        return Err(RadiusFailureOr::Failure(RadiusFailure::Speed { max_speed }));
    }
    Ok((min_chi_f, max_speed))
}

enum RadiusFailureOr {
    Failure(RadiusFailure),
    Field(crate::field::FieldError),
}

impl From<RadiusFailureOr> for ChartError {
    fn from(e: RadiusFailureOr) -> Self {
        match e {
            RadiusFailureOr::Failure(f) => ChartError::Construction(f),
            RadiusFailureOr::Field(f) => ChartError::Field(f),
        }
    }
}

/// Halves `initial_radius` until both sampled conditions hold with the
/// given margin, then bisects between the accepted radius and its failed
/// double to push `r₁` towards the largest radius that passes.
pub fn compute_radii(
    field: &VectorField,
    chi: &[f64],
    initial_radius: f64,
    samples: usize,
    seed: u64,
    margin: f64,
) -> Result<Radii, ChartError> {
    if !(initial_radius > 0.0) || !(margin >= 0.0) {
        return Err(ChartError::InvalidParameters("radius search needs initial_radius > 0 and margin >= 0"));
    }
    let probes = template(field.dimension(), samples, seed);
    let mut r = initial_radius;
    let mut last_failure = RadiusFailure::Domain;
    for halvings in 0..MAX_HALVINGS {
        match check(field, chi, &probes, r, margin) {
            Ok(mut extremes) => {
                if halvings > 0 {
                    let (mut lo, mut hi) = (r, 2.0 * r);
                    for _ in 0..REFINE_STEPS {
                        let mid = 0.5 * (lo + hi);
                        match check(field, chi, &probes, mid, margin) {
                            Ok(e) => {
                                lo = mid;
                                extremes = e;
                            }
                            Err(RadiusFailureOr::Failure(_)) => hi = mid,
                            Err(e) => return Err(e.into()),
                        }
                    }
                    r = lo;
                }
                return Ok(Radii {
                    r1: r,
                    t: horizon_for(r),
                    r2: inner_radius_for(r),
                    min_chi_f: extremes.0,
                    max_speed: extremes.1,
                    halvings,
                });
            }
            Err(RadiusFailureOr::Failure(f)) => last_failure = f,
            Err(e) => return Err(e.into()),
        }
        r *= 0.5;
    }
    Err(ChartError::Construction(last_failure))
}

/// Checks the sampled conditions at a given radius.
pub fn check_radius(
    field: &VectorField,
    chi: &[f64],
    r1: f64,
    samples: usize,
    seed: u64,
    margin: f64,
) -> Result<Radii, ChartError> {
    let probes = template(field.dimension(), samples, seed);
    let (min_chi_f, max_speed) = check(field, chi, &probes, r1, margin)?;
    Ok(Radii { r1, t: horizon_for(r1), r2: inner_radius_for(r1), min_chi_f, max_speed, halvings: 0 })
}
