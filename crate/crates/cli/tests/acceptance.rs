//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::process::Command;
use std::time::Instant;

use flowbox_core::builtin;
use flowbox_core::dsl::{parse_field, SAMPLE_SOURCES};
use flowbox_core::flowbox::{build_chart, normalize, straighten_1d, swap_map_a, FlowBoxChart};
use flowbox_core::integrate::{crossing_time, picard_solve, CrossingOptions};
use flowbox_core::linalg;
use flowbox_core::rng::SampleRng;
use flowbox_core::verify::{
    dependence_audit, flow_axioms_check, interior_radius_audit, lipschitz_ratio_scan, nonsmoothness_probe,
    roundtrip_audit, verify_conjugacy, DependenceConfig,
};
use flowbox_core::VectorField;

const CHART_FIELDS: [&str; 3] = ["abs-shear", "exp-shear", "constant-e1"];
const SEED: u64 = 0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn chart(name: &str) -> FlowBoxChart {
    build_chart(&builtin::by_name(name).unwrap(), &[0.0, 0.0]).unwrap()
}

fn conjugacy() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for name in CHART_FIELDS {
        let start = Instant::now();
        let c = chart(name);
        let report = verify_conjugacy(&c, 500, c.t() / 2.0, SEED);
        let seconds = start.elapsed().as_secs_f64();
        match report {
            Ok(r) => {
                let ok = r.samples == 500 && r.max_conjugacy_residual <= 1e-6 && seconds < 10.0;
                passed &= ok;
                parts.push(format!("{name} {:.2e} in {seconds:.2}s", r.max_conjugacy_residual));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("{name} error: {e}"));
            }
        }
    }
    outcome(passed, format!("max residual <= 1e-6, < 10 s: {}", parts.join("; ")))
}

fn roundtrip() -> Outcome {
    let mut worst = 0.0_f64;
    for name in CHART_FIELDS {
        worst = worst.max(roundtrip_audit(&chart(name), 1000, SEED).unwrap().max_roundtrip_residual);
    }
    outcome(worst <= 1e-7, format!("max |phi^-1(phi(x)) - x| = {worst:.2e} <= 1e-7 over 3 x 1000 samples"))
}

fn lipschitz_bounds() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for name in CHART_FIELDS {
        let c = chart(name);
        let r = lipschitz_ratio_scan(&c, 10_000, SEED).unwrap();
        passed &= r.violations == 0 && r.k_exact;
        parts.push(format!(
            "{name} phi {:.4}/{:.4} inv {:.4}/{:.4} violations {}",
            r.max_ratio_phi, r.bound_phi, r.max_ratio_phi_inv, r.bound_phi_inv, r.violations
        ));
    }
    outcome(passed, format!("10^4 pairs, exact K: {}", parts.join("; ")))
}

fn crossing_oracle() -> Outcome {
    let c = chart("abs-shear");
    let field = builtin::abs_shear();
    let options = CrossingOptions::default();
    let mut rng = SampleRng::stream(SEED, 100);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let x = rng.in_ball(&[0.0, 0.0], c.r2());
        let r = crossing_time(&field, &x, c.chi(), c.t(), &options).unwrap();
        worst = worst.max((r.t_x - x[0] / (1.0 + x[1].abs())).abs());
    }
    outcome(worst <= 1e-8, format!("max |t_x - x/(1+|y|)| = {worst:.2e} <= 1e-8 over 1000 points of W1"))
}

fn lemma_two() -> Outcome {
    let audit = dependence_audit(
        &builtin::abs_shear(),
        &DependenceConfig {
            k: 1.0,
            k_exact: true,
            center: vec![0.0, 0.0],
            radius: 1.0,
            pair_count: 10_000,
            t_min: -0.25,
            t_max: 0.25,
            seed: SEED,
            tolerance: 1e-11,
        },
    )
    .unwrap();
    let sharp = dependence_audit(
        &builtin::linear_growth(),
        &DependenceConfig {
            k: 1.0,
            k_exact: true,
            center: vec![0.0],
            radius: 1.0,
            pair_count: 1000,
            t_min: 0.2,
            t_max: 0.2,
            seed: SEED,
            tolerance: 1e-12,
        },
    )
    .unwrap();
    let spread = (sharp.max_ratio - 1.0).abs().max((sharp.min_ratio - 1.0).abs());
    outcome(
        audit.violations == 0 && spread <= 1e-6,
        format!(
            "abs-shear 10^4 pairs: {} violations (max ratio {:.4}); x' = x at t = 0.2: |ratio - 1| <= {spread:.2e}",
            audit.violations, audit.max_ratio
        ),
    )
}

fn nondifferentiability() -> Outcome {
    let c = chart("abs-shear");
    let steps = [1e-2, 1e-3, 1e-4, 1e-5];
    let kink = nonsmoothness_probe(&c, &[0.05, 0.0], 1, &steps).unwrap().estimated_jump;
    let flat = nonsmoothness_probe(&c, &[0.0, 0.0], 1, &steps).unwrap().estimated_jump;
    outcome(
        (kink - 0.1).abs() <= 1e-3 && flat <= 1e-6,
        format!("jump at (0.05, 0) = {kink:.6} (0.1 +- 1e-3), at (0, 0) = {flat:.2e} (<= 1e-6)"),
    )
}

fn straightening() -> Outcome {
    let arctan = straighten_1d(&builtin::one_plus_xsq(), 0.0, 1.0, 1e-12).unwrap();
    let step = straighten_1d(&builtin::step_field(), 0.0, 2.0, 1e-12).unwrap();
    let err = (arctan - FRAC_PI_4).abs();
    outcome(err <= 1e-8 && step == 1.5, format!("|phi(1) - pi/4| = {err:.2e} <= 1e-8; step field phi(2) = {step}"))
}

fn picard() -> Outcome {
    let field = builtin::linear_growth();
    let three = picard_solve(&field, &[1.0], 0.1, 3, 4001).unwrap().trajectory.final_state()[0];
    let ten = picard_solve(&field, &[1.0], 0.1, 10, 4001).unwrap().trajectory.final_state()[0];
    let cubic = 1.0 + 0.1 + 0.01 / 2.0 + 0.001 / 6.0;
    let e3 = (three - cubic).abs();
    let e10 = (ten - 0.1f64.exp()).abs();
    outcome(
        e3 <= 1e-9 && e10 <= 1e-10,
        format!("3 iterations {three:.10} (cubic sum error {e3:.2e}); 10 iterations error vs e^0.1 {e10:.2e}"),
    )
}

fn normalization_algebra() -> Outcome {
    let eps = f64::EPSILON;
    let mut rng = SampleRng::stream(SEED, 101);
    let mut worst_swap = 0.0_f64;
    let mut worst_b = 0.0_f64;
    for i in 0..1000 {
        let n = 2 + i % 4;
        let z = linalg::unit(n, 0);
        let y = loop {
            let y = rng.direction(n);
            if linalg::dot(&y, &z).abs() < 0.99 {
                break y;
            }
        };
        let a = swap_map_a(&y, &z).unwrap();
        let x = rng.in_ball(&vec![0.0; n], 10.0);
        // Errors in units of eps times the natural scale of each identity.
        let scale = a.norm_bound() * a.norm_bound();
        worst_swap = worst_swap
            .max(linalg::distance(&a.apply(&a.apply(&x)), &x) / (eps * scale * (1.0 + linalg::norm(&x))))
            .max(linalg::distance(&a.apply(&y), &z) / (eps * scale))
            .max(linalg::distance(&a.apply(&z), &y) / (eps * scale));

        let m = 1 + i % 5;
        let v = linalg::scale(&rng.direction(m), rng.uniform(0.1, 5.0));
        let w = v.clone();
        let field = VectorField::from_fn(m, "constant", 4.0, move |_, out| out.copy_from_slice(&w));
        let x1 = rng.in_ball(&vec![0.0; m], 1.0);
        let (_, record) = normalize(&field, &x1).unwrap();
        worst_b = worst_b.max(linalg::distance(&record.linear_map.apply(&v), &linalg::unit(m, 0)) / eps);
    }
    outcome(
        worst_swap <= 16.0 && worst_b <= 16.0,
        format!("A: worst {worst_swap:.2} eps (A o A = I, A(y) = z, A(z) = y); B f(x1) = e1: worst {worst_b:.2} eps; limit 16 eps"),
    )
}

fn radii() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for name in CHART_FIELDS {
        let c = chart(name);
        passed &= c.t() == c.r1() / 4.0 && c.r2() == (c.r1() / 10.0).min(c.t() / 2.0);
        parts.push(format!("{name} r1 = {}", c.r1()));
    }
    let abs = chart("abs-shear").r1();
    passed &= (0.9..=1.0).contains(&abs);
    outcome(passed, format!("T = r1/4 and r2 = min(r1/10, T/2) exactly; {}", parts.join(", ")))
}

fn interior_radius() -> Outcome {
    let mut failures = 0;
    let mut parts = Vec::new();
    for name in CHART_FIELDS {
        let r = interior_radius_audit(&chart(name), 20, 100, SEED).unwrap();
        failures += r.failures;
        parts.push(format!("{name} min s4 {:.2e}", r.min_radius));
    }
    outcome(failures == 0, format!("{failures} failures over 3 x 20 x 100 perturbations; {}", parts.join(", ")))
}

fn flow_axioms() -> Outcome {
    let mut identity = 0.0_f64;
    let mut semigroup = 0.0_f64;
    for field in [builtin::abs_shear(), builtin::exp_shear(), builtin::constant_e1()] {
        let r = flow_axioms_check(&field, &[0.0, 0.0], 1.0, 0.25, 500, SEED, 1e-10).unwrap();
        identity = identity.max(r.max_identity_residual);
        semigroup = semigroup.max(r.max_semigroup_residual);
    }
    outcome(
        identity == 0.0 && semigroup <= 1e-7,
        format!("|F(x,0) - x| = {identity}; max semigroup residual {semigroup:.2e} <= 1e-7"),
    )
}

fn dsl() -> Outcome {
    let mut stable = 0;
    for (dim, source) in SAMPLE_SOURCES {
        let first = parse_field(source, dim).unwrap();
        let second = parse_field(&first.to_string(), dim).unwrap();
        if first == second && second.to_string() == first.to_string() {
            stable += 1;
        }
    }
    let mut worst = 0.0_f64;
    let mut rng = SampleRng::stream(SEED, 102);
    for name in builtin::NAMES {
        let field = builtin::by_name(name).unwrap();
        let (dim, source) = builtin::dsl_source(name).unwrap();
        let expr = parse_field(source, dim).unwrap();
        for _ in 0..1000 {
            let x = rng.in_ball(&vec![0.0; dim], 3.9);
            worst = worst.max(linalg::distance(&field.eval(&x).unwrap(), &expr.eval(&x).unwrap()));
        }
    }
    outcome(
        stable == SAMPLE_SOURCES.len() && SAMPLE_SOURCES.len() == 50 && worst <= 1e-12,
        format!("{stable}/50 corpus cases idempotent; builtin rebuilds differ by at most {worst:.2e}"),
    )
}

fn reproducibility() -> Outcome {
    let dir = std::env::temp_dir().join(format!("flowbox-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let run = |args: &[&str]| {
        let status = Command::new(env!("CARGO_BIN_EXE_flowbox"))
            .args(args)
            .env_remove("FLOWBOX_SEED")
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        status.success()
    };
    let path = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let mut ok = true;
    for round in ["a", "b"] {
        let chart = path(&format!("chart-{round}.json"));
        ok &= run(&["construct", "--field", "dsl:2:(1+abs(y), 0)", "--point", "0.01,-0.02", "--seed", "9", "-o", &chart]);
        ok &= run(&["verify", &chart, "--seed", "9", "--pairs", "2000", "--dependence-pairs", "2000", "-o", &path(&format!("report-{round}.json")), "--residuals-csv", &path(&format!("residuals-{round}.csv"))]);
        ok &= run(&["scan-lipschitz", &chart, "--seed", "9", "--pairs", "2000", "-o", &path(&format!("scan-{round}.json"))]);
    }
    let same = |name: &str| fs::read(path(&format!("{name}-a.json"))).ok() == fs::read(path(&format!("{name}-b.json"))).ok();
    let csv_same = fs::read(path("residuals-a.csv")).ok() == fs::read(path("residuals-b.csv")).ok();
    let identical = same("chart") && same("report") && same("scan") && csv_same;
    let _ = fs::remove_dir_all(&dir);
    outcome(ok && identical, format!("two runs with seed 9: commands succeeded = {ok}, chart/report/scan/csv bit-identical = {identical}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("conjugacy", conjugacy),
        ("round trip", roundtrip),
        ("Lipschitz bounds", lipschitz_bounds),
        ("crossing oracle", crossing_oracle),
        ("continuous dependence", lemma_two),
        ("non-differentiability", nondifferentiability),
        ("1-D straightening", straightening),
        ("Picard fidelity", picard),
        ("normalization algebra", normalization_algebra),
        ("radii formulas", radii),
        ("certified interior radius", interior_radius),
        ("flow axioms", flow_axioms),
        ("DSL", dsl),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let verdict = if result.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {name}: {} [{:.2}s]", i + 1, result.detail, start.elapsed().as_secs_f64());
        if !result.passed {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
