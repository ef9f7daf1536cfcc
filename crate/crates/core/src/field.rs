//! Vector fields `f: B(c, R) ⊂ ℝⁿ → ℝⁿ`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dsl::EvalError;
use crate::linalg;

/// Evaluation callback: writes `f(x)` into `out`.
pub type EvalFn = dyn Fn(&[f64], &mut [f64]) -> Result<(), FieldError> + Send + Sync;

#[derive(Clone, Debug, PartialEq)]
pub enum FieldError {
    DimensionMismatch { expected: usize, found: usize },
    OutOfDomain { distance: f64, radius: f64 },
    NonFinite { component: usize },
    Expression(EvalError),
    DegenerateSampling,
    InvalidBall,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            FieldError::OutOfDomain { distance, radius } => write!(
                f,
                "point at distance {distance} from the domain center lies outside the domain radius {radius}"
            ),
            FieldError::NonFinite { component } => {
                write!(f, "field produced a non-finite value in component {component}")
            }
            FieldError::Expression(e) => write!(f, "field expression failed: {e}"),
            FieldError::DegenerateSampling => f.write_str("all sampled pairs coincide"),
            FieldError::InvalidBall => f.write_str("sampling ball is not inside the field domain"),
        }
    }
}

impl core::error::Error for FieldError {}

impl From<EvalError> for FieldError {
    fn from(e: EvalError) -> Self {
        FieldError::Expression(e)
    }
}

/// Regularity class of a field, which decides how it may be integrated.
#[derive(Clone, Debug, PartialEq)]
pub enum Regularity {
    Lipschitz,
    /// One-dimensional piecewise constant field; integrated in closed form
    /// only.
    PiecewiseConstant(PiecewiseConstant1d),
}

#[derive(Clone)]
pub struct VectorField {
    dimension: usize,
    eval: Arc<EvalFn>,
    domain_center: Vec<f64>,
    domain_radius: f64,
    known_lipschitz: Option<f64>,
    known_speed_bound: Option<f64>,
    label: String,
    regularity: Regularity,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField")
            .field("label", &self.label)
            .field("dimension", &self.dimension)
            .field("domain_center", &self.domain_center)
            .field("domain_radius", &self.domain_radius)
            .field("known_lipschitz", &self.known_lipschitz)
            .field("known_speed_bound", &self.known_speed_bound)
            .finish_non_exhaustive()
    }
}

impl VectorField {
    /// Field with domain `B(0, domain_radius)` and no known constants.
    pub fn new<F>(dimension: usize, label: impl Into<String>, domain_radius: f64, eval: F) -> Self
    where
        F: Fn(&[f64], &mut [f64]) -> Result<(), FieldError> + Send + Sync + 'static,
    {
        assert!(dimension > 0, "vector fields need a positive dimension");
        assert!(domain_radius > 0.0, "domain radius must be positive");
        VectorField {
            dimension,
            eval: Arc::new(eval),
            domain_center: vec![0.0; dimension],
            domain_radius,
            known_lipschitz: None,
            known_speed_bound: None,
            label: label.into(),
            regularity: Regularity::Lipschitz,
        }
    }

    /// Convenience constructor for infallible closed forms.
    pub fn from_fn<F>(dimension: usize, label: impl Into<String>, domain_radius: f64, f: F) -> Self
    where
        F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        Self::new(dimension, label, domain_radius, move |x, out| {
            f(x, out);
            Ok(())
        })
    }

    pub fn with_domain_center(mut self, center: Vec<f64>) -> Self {
        assert_eq!(center.len(), self.dimension);
        self.domain_center = center;
        self
    }

    pub fn with_known_lipschitz(mut self, k: f64) -> Self {
        assert!(k >= 0.0);
        self.known_lipschitz = Some(k);
        self
    }

    pub fn with_known_speed_bound(mut self, m: f64) -> Self {
        assert!(m > 0.0);
        self.known_speed_bound = Some(m);
        self
    }

    pub fn with_regularity(mut self, regularity: Regularity) -> Self {
        self.regularity = regularity;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain_center(&self) -> &[f64] {
        &self.domain_center
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn known_lipschitz(&self) -> Option<f64> {
        self.known_lipschitz
    }

    pub fn known_speed_bound(&self) -> Option<f64> {
        self.known_speed_bound
    }

    pub fn regularity(&self) -> &Regularity {
        &self.regularity
    }

    pub fn is_lipschitz(&self) -> bool {
        matches!(self.regularity, Regularity::Lipschitz)
    }

    /// Whether `x` lies in the closed domain ball.
    pub fn contains(&self, x: &[f64]) -> bool {
        linalg::distance(x, &self.domain_center) <= self.domain_radius
    }

    /// Whether the closed ball `B(center, radius)` lies in the domain.
    pub fn contains_ball(&self, center: &[f64], radius: f64) -> bool {
        linalg::distance(center, &self.domain_center) + radius <= self.domain_radius
    }

    /// `f(x)` for a point of the domain ball.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, FieldError> {
        self.check_dimension(x)?;
        let distance = linalg::distance(x, &self.domain_center);
        if !(distance <= self.domain_radius) {
            return Err(FieldError::OutOfDomain { distance, radius: self.domain_radius });
        }
        let mut out = vec![0.0; self.dimension];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }

    /// Evaluates without the domain check; still rejects non-finite output.
    /// Integrators use this for intermediate stages and check accepted
    /// states against the domain themselves.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), FieldError> {
        (self.eval)(x, out)?;
        if let Some(component) = out.iter().position(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite { component });
        }
        Ok(())
    }

    pub(crate) fn check_dimension(&self, x: &[f64]) -> Result<(), FieldError> {
        if x.len() != self.dimension {
            return Err(FieldError::DimensionMismatch { expected: self.dimension, found: x.len() });
        }
        Ok(())
    }
}

/// `f(x) = values[k]` on the `k`-th interval cut out by the increasing
/// `breaks`; each interval is closed on the left, so at a break the field
/// takes the value to its right.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseConstant1d {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstant1d {
    /// Returns `None` unless the breaks increase strictly and the
    /// `breaks.len() + 1` values are finite, nonzero and share one sign.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Option<Self> {
        if values.len() != breaks.len() + 1 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return None;
        }
        if !values.iter().all(|v| v.is_finite() && *v != 0.0) {
            return None;
        }
        let positive = values[0] > 0.0;
        if values.iter().any(|v| (*v > 0.0) != positive) {
            return None;
        }
        Some(PiecewiseConstant1d { breaks, values })
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, x: f64) -> f64 {
        self.values[self.breaks.iter().filter(|b| **b <= x).count()]
    }

    /// Exact `∫ₐᵇ ds / f(s)`.
    pub fn straighten(&self, a: f64, b: f64) -> f64 {
        if a > b {
            return -self.straighten(b, a);
        }
        let mut total = 0.0;
        let mut left = a;
        for (k, value) in self.values.iter().enumerate() {
            let right = self.breaks.get(k).copied().unwrap_or(f64::INFINITY).min(b);
            if right > left {
                total += (right - left) / value;
                left = right;
            }
            if left >= b {
                break;
            }
        }
        total
    }

    /// Exact solution `F(x, t)` of `x' = f(x)`: the solution moves at speed
    /// `|f|` and changes speed at each break it passes.
    pub fn flow(&self, x: f64, t: f64) -> f64 {
        let moving_right = (self.values[0] > 0.0) == (t > 0.0);
        let mut pos = x;
        let mut remaining = libm::fabs(t);
        while remaining > 0.0 {
            let segment = if moving_right {
                self.breaks.iter().filter(|b| **b <= pos).count()
            } else {
                self.breaks.iter().filter(|b| **b < pos).count()
            };
            let speed = libm::fabs(self.values[segment]);
            let boundary = if moving_right {
                self.breaks.get(segment).copied()
            } else {
                segment.checked_sub(1).map(|k| self.breaks[k])
            };
            let step = speed * remaining;
            match boundary {
                Some(b) if libm::fabs(b - pos) < step => {
                    remaining -= libm::fabs(b - pos) / speed;
                    pos = b;
                }
                _ => {
                    pos += if moving_right { step } else { -step };
                    remaining = 0.0;
                }
            }
        }
        pos
    }
}
