use flowbox_core::builtin;
use flowbox_core::dsl::{parse_field, BinOp, Expr, FieldExpr, Func};
use flowbox_core::estimate::{estimate, estimate_lipschitz};
use flowbox_core::flowbox::{
    compute_radii, inner_radius_for, normalize, project_pi, swap_map_a, ChartConfig, FlowBoxChart,
};
use flowbox_core::integrate::dependence_bound;
use flowbox_core::linalg::{self, Matrix};
use flowbox_core::VectorField;
use proptest::prelude::*;

fn vector(n: usize, scale: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-scale..scale, n)
}

fn unit_vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    vector(n, 1.0).prop_filter_map("nonzero", |v| {
        let r = linalg::norm(&v);
        (r > 1e-3).then(|| linalg::scale(&v, 1.0 / r))
    })
}

fn independent_pair(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (vector(n, 2.0), unit_vector(n)).prop_filter("independent", |(y, z)| {
        let c = linalg::dot(y, z) / linalg::norm(y).max(1e-300);
        linalg::norm(y) > 1e-2 && c.abs() < 0.99
    })
}

fn expr(dim: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(0.0..100.0f64).prop_map(Expr::Num), (0..dim).prop_map(Expr::Var)];
    leaf.prop_recursive(4, 32, 3, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), inner.clone(), 0..4usize).prop_map(|(a, b, op)| {
                let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][op];
                Expr::Binary(op, Box::new(a), Box::new(b))
            }),
            (inner.clone(), -4i32..5).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
            (0..Func::ALL.len(), prop::collection::vec(inner, 3)).prop_map(|(i, mut args)| {
                let f = Func::ALL[i];
                args.truncate(f.arity());
                Expr::Call(f, args)
            }),
        ]
    })
}

/// Agreement up to the last couple of bits; `exp` implementations may
/// round differently.
fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs())
}

fn near(a: &[f64], b: &[f64], tol: f64) -> bool {
    linalg::distance(a, b) <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn swap_map_is_an_involution_exchanging_y_and_z((y, z) in (2usize..6).prop_flat_map(independent_pair),
                                                    seed in any::<u64>()) {
        let a = swap_map_a(&y, &z).unwrap();
        let n = y.len();
        let x: Vec<f64> = (0..n).map(|i| ((seed >> (i * 7)) % 97) as f64 / 13.0 - 3.0).collect();
        let scale = 1.0 + linalg::norm(&x);
        let tol = 64.0 * f64::EPSILON * a.norm_bound() * a.norm_bound() * scale;
        prop_assert!(near(&a.apply(&a.apply(&x)), &x, tol));
        prop_assert!(near(&a.apply(&y), &z, tol));
        prop_assert!(near(&a.apply(&z), &y, tol));
        prop_assert!((a.psi(&y) + 1.0).abs() <= 1e-12 && (a.psi(&z) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn projection_is_idempotent_and_reconstructs(z in (2usize..6).prop_flat_map(unit_vector),
                                                 q in vector(5, 10.0)) {
        let q = &q[..z.len()];
        let p = project_pi(&z, &z, q);
        prop_assert!(linalg::dot(&z, &p).abs() <= 1e-13);
        prop_assert!(near(&project_pi(&z, &z, &p), &p, 1e-13));
        prop_assert!(near(&linalg::axpy(&p, linalg::dot(&z, q), &z), q, 1e-13));
        prop_assert!(linalg::norm(&p) <= 2.0 * linalg::norm(q) + 1e-13);
        prop_assert!(linalg::dot(&z, q).abs() <= linalg::norm(q) * (1.0 + 1e-15));
    }

    #[test]
    fn normalization_sends_direction_to_e1(direction in (1usize..5).prop_flat_map(|n| vector(n, 3.0)),
                                           x1 in vector(4, 1.0)) {
        prop_assume!(linalg::norm(&direction) > 1e-3);
        let n = direction.len();
        let d = direction.clone();
        let field = VectorField::from_fn(n, "constant", 4.0, move |_, out| out.copy_from_slice(&d));
        let (normalized, record) = normalize(&field, &x1[..n]).unwrap();
        let e1 = linalg::unit(n, 0);
        let tol = 8.0 * f64::EPSILON * (1.0 + linalg::norm(&direction));
        prop_assert!(near(&record.linear_map.apply(&direction), &e1, tol));
        prop_assert!(record.linear_map.mul(&record.linear_map_inverse).distance_from_identity() <= 1e-14 * (1.0 + linalg::norm(&direction)));
        prop_assert!(near(&normalized.eval(&vec![0.0; n]).unwrap(), &e1, tol));
        prop_assert!(near(&record.from_normalized(&record.to_normalized(&x1[..n])), &x1[..n], 1e-15));
    }

    #[test]
    fn radius_search_applies_formulas_exactly(speed in 0.6f64..1.8, tilt in -0.3f64..0.3, initial in 0.1f64..3.0) {
        let field = VectorField::from_fn(2, "affine", 4.0, move |x, out| {
            out[0] = speed + tilt * x[1];
            out[1] = 0.0;
        });
        let r = compute_radii(&field, &[1.0, 0.0], initial, 200, 3, 0.01).unwrap();
        prop_assert_eq!(r.t, r.r1 / 4.0);
        prop_assert_eq!(r.r2, (r.r1 / 10.0).min(r.t / 2.0));
        prop_assert_eq!(r.r2, inner_radius_for(r.r1));
        prop_assert!(r.r1 <= initial);
        prop_assert!(r.min_chi_f >= 0.51 && r.max_speed <= 1.99);
    }

    #[test]
    fn dsl_print_parse_roundtrip(components in (1usize..4).prop_flat_map(|n| prop::collection::vec(expr(n), n))) {
        let n = components.len();
        let printed = if n == 1 {
            components[0].display(1).to_string()
        } else {
            let parts: Vec<String> = components.iter().map(|c| c.display(n).to_string()).collect();
            format!("({})", parts.join(", "))
        };
        let parsed: FieldExpr = parse_field(&printed, n).unwrap();
        prop_assert_eq!(parsed.components(), &components[..], "{}", printed);
        prop_assert_eq!(parsed.to_string(), printed);
    }

    #[test]
    fn dependence_bound_formula(k in 0.0f64..5.0, d in 0.0f64..10.0, t in -2.0f64..2.0) {
        prop_assert!(rel_close(dependence_bound(k, d, t), d * (k * t.abs()).exp()));
        prop_assert_eq!(dependence_bound(0.0, d, t), d);
        prop_assert_eq!(dependence_bound(k, d, 0.0), d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn estimates_never_exceed_known_constants(seed in any::<u64>()) {
        for field in builtin::builtin_catalog().into_iter().filter(|f| f.is_lipschitz()) {
            let center = vec![0.0; field.dimension()];
            let stripped = VectorField::new(field.dimension(), "raw", field.domain_radius(), {
                let f = field.clone();
                move |x, out| f.eval_into(x, out)
            });
            let e = estimate(&stripped, &center, 3.0, 300, seed).unwrap();
            prop_assert!(e.raw_lipschitz <= field.known_lipschitz().unwrap(), "{}", field.label());
            prop_assert!(e.raw_speed <= field.known_speed_bound().unwrap(), "{}", field.label());
        }
    }

    #[test]
    fn lipschitz_estimate_is_monotone_in_samples(seed in any::<u64>(), n in 10usize..200) {
        let field = VectorField::from_fn(2, "wavy", 4.0, |x, out| {
            out[0] = (3.0 * x[1]).sin();
            out[1] = x[0].abs();
        });
        let small = estimate_lipschitz(&field, &[0.0, 0.0], 1.0, n, seed).unwrap();
        let large = estimate_lipschitz(&field, &[0.0, 0.0], 1.0, 2 * n, seed).unwrap();
        prop_assert!(large.raw_lipschitz >= small.raw_lipschitz);
        prop_assert!(large.raw_speed >= small.raw_speed);
    }

    #[test]
    fn chart_invariants_at_random_base_points(x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let config = ChartConfig { radius_samples: 300, lipschitz_samples: 300, ..ChartConfig::default() };
        let chart = FlowBoxChart::build(&builtin::exp_shear(), &[x, y], config).unwrap();
        prop_assert_eq!(chart.t(), chart.r1() / 4.0);
        prop_assert_eq!(chart.r2(), (chart.r1() / 10.0).min(chart.t() / 2.0));
        prop_assert!(rel_close(chart.k_phi(), 7.0 * (chart.k() * chart.t()).exp()));
        prop_assert!(rel_close(chart.k_phi_inv(), 2.0 + 2.0 * (chart.k() * chart.t()).exp()));
        prop_assert_eq!(linalg::dot(chart.chi(), chart.z()), 1.0);
        let b: &Matrix = &chart.normalization().linear_map;
        prop_assert!(near(&b.apply(&builtin::exp_shear().eval(&[x, y]).unwrap()), &[1.0, 0.0], 1e-15));
        prop_assert_eq!(chart.phi(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }
}
