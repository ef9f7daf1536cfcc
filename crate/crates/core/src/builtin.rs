//! Builtin fields, each with the constants that hold on its domain ball.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::field::{PiecewiseConstant1d, Regularity, VectorField};

/// Radius of the domain ball `B(0, R)` shared by all builtins.
pub const DOMAIN_RADIUS: f64 = 4.0;

/// `f(x, y) = (1 + |y|, 0)`: Lipschitz but not differentiable across `y = 0`.
pub fn abs_shear() -> VectorField {
    VectorField::from_fn(2, "abs-shear", DOMAIN_RADIUS, |x, out| {
        out[0] = 1.0 + libm::fabs(x[1]);
        out[1] = 0.0;
    })
    .with_known_lipschitz(1.0)
    .with_known_speed_bound(1.0 + DOMAIN_RADIUS)
}

/// `f(x, y) = (1, y)`, with flow `(x + t, y·eᵗ)`.
pub fn exp_shear() -> VectorField {
    VectorField::from_fn(2, "exp-shear", DOMAIN_RADIUS, |x, out| {
        out[0] = 1.0;
        out[1] = x[1];
    })
    .with_known_lipschitz(1.0)
    .with_known_speed_bound(libm::sqrt(1.0 + DOMAIN_RADIUS * DOMAIN_RADIUS))
}

/// `f ≡ e₁` on ℝ².
pub fn constant_e1() -> VectorField {
    VectorField::from_fn(2, "constant-e1", DOMAIN_RADIUS, |_, out| {
        out[0] = 1.0;
        out[1] = 0.0;
    })
    .with_known_lipschitz(0.0)
    .with_known_speed_bound(1.0)
}

/// `f(x) = 1 + x²` on ℝ, straightened by `arctan`.
pub fn one_plus_xsq() -> VectorField {
    VectorField::from_fn(1, "one-plus-xsq", DOMAIN_RADIUS, |x, out| out[0] = 1.0 + x[0] * x[0])
        .with_known_lipschitz(2.0 * DOMAIN_RADIUS)
        .with_known_speed_bound(1.0 + DOMAIN_RADIUS * DOMAIN_RADIUS)
}

/// `f(x) = x` on ℝ: the equality case of continuous dependence.
pub fn linear_growth() -> VectorField {
    VectorField::from_fn(1, "linear-growth", DOMAIN_RADIUS, |x, out| out[0] = x[0])
        .with_known_lipschitz(1.0)
        .with_known_speed_bound(DOMAIN_RADIUS)
}

/// The discontinuous step `f(x) = 1` for `x < 1`, `2` for `x ≥ 1`.
/// Not Lipschitz: chart construction and the generic integrators refuse it.
pub fn step_field() -> VectorField {
    let pieces = step_pieces();
    let eval = pieces.clone();
    VectorField::from_fn(1, "step-field", DOMAIN_RADIUS, move |x, out| out[0] = eval.value(x[0]))
        .with_known_speed_bound(2.0)
        .with_regularity(Regularity::PiecewiseConstant(pieces))
}

fn step_pieces() -> PiecewiseConstant1d {
    PiecewiseConstant1d::new(vec![1.0], vec![1.0, 2.0]).expect("valid step")
}

/// DSL source reproducing each builtin, as `(dimension, source)`.
pub fn dsl_source(name: &str) -> Option<(usize, &'static str)> {
    Some(match name {
        "abs-shear" => (2, "(1+abs(y), 0)"),
        "exp-shear" => (2, "(1, y)"),
        "constant-e1" => (2, "(1, 0)"),
        "one-plus-xsq" => (1, "1+x^2"),
        "linear-growth" => (1, "x"),
        "step-field" => (1, "ifge(x-1, 2, 1)"),
        _ => return None,
    })
}

pub const NAMES: [&str; 6] =
    ["abs-shear", "exp-shear", "constant-e1", "one-plus-xsq", "linear-growth", "step-field"];

pub fn by_name(name: &str) -> Option<VectorField> {
    Some(match name {
        "abs-shear" => abs_shear(),
        "exp-shear" => exp_shear(),
        "constant-e1" => constant_e1(),
        "one-plus-xsq" => one_plus_xsq(),
        "linear-growth" => linear_growth(),
        "step-field" => step_field(),
        _ => return None,
    })
}

pub fn builtin_catalog() -> Vec<VectorField> {
    NAMES.iter().filter_map(|n| by_name(n)).collect()
}

pub fn names() -> Vec<String> {
    NAMES.iter().map(|n| String::from(*n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_field;
    use crate::rng::SampleRng;

    #[test]
    fn catalog_contents() {
        let catalog = builtin_catalog();
        let get = |n: &str| catalog.iter().find(|f| f.label() == n).unwrap();
        assert_eq!(get("abs-shear").known_lipschitz(), Some(1.0));
        assert_eq!(get("constant-e1").known_lipschitz(), Some(0.0));
        assert!(!get("step-field").is_lipschitz());
        assert!(get("one-plus-xsq").is_lipschitz());
    }

    #[test]
    fn closed_forms() {
        assert_eq!(abs_shear().eval(&[0.0, -0.5]).unwrap(), vec![1.5, 0.0]);
        assert_eq!(exp_shear().eval(&[0.3, 2.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(constant_e1().eval(&[1.7, -3.0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(step_field().eval(&[1.0]).unwrap(), vec![2.0]);
        assert_eq!(step_field().eval(&[0.999]).unwrap(), vec![1.0]);
    }

    #[test]
    fn known_constants_dominate_samples() {
        let mut rng = SampleRng::seeded(11);
        for f in builtin_catalog().into_iter().filter(|f| f.is_lipschitz()) {
            let k = f.known_lipschitz().unwrap();
            let m = f.known_speed_bound().unwrap();
            for _ in 0..2000 {
                let p = rng.in_ball(f.domain_center(), f.domain_radius());
                let q = rng.in_ball(f.domain_center(), f.domain_radius());
                let (fp, fq) = (f.eval(&p).unwrap(), f.eval(&q).unwrap());
                let d = crate::linalg::distance(&p, &q);
                assert!(crate::linalg::distance(&fp, &fq) <= k * d, "{}", f.label());
                assert!(crate::linalg::norm(&fp) <= m, "{}", f.label());
            }
        }
    }

    #[test]
    fn dsl_rebuilds_agree() {
        let mut rng = SampleRng::seeded(5);
        for name in NAMES {
            let f = by_name(name).unwrap();
            let (n, src) = dsl_source(name).unwrap();
            let g = parse_field(src, n).unwrap();
            for _ in 0..200 {
                let p = rng.in_ball(f.domain_center(), f.domain_radius());
                assert_eq!(f.eval(&p).unwrap(), g.eval(&p).unwrap(), "{name}");
            }
        }
    }
}
