//! Subcommand implementations. Each writes its human-readable summary to
//! `out` and its artifacts to the given paths.

use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use flowbox_core::builtin;
use flowbox_core::flowbox::{straighten_1d, ChartConfig, FlowBoxChart};
use flowbox_core::integrate::{integrate, piecewise_trajectory, Trajectory};
use flowbox_core::verify::{
    dependence_audit, flow_axioms_check, interior_radius_audit, lipschitz_ratio_scan, nonsmoothness_probe,
    piecewise_conjugacy_check, roundtrip_audit, verify_conjugacy, DependenceConfig, JacobianJumpReport,
};
use flowbox_core::Regularity;
use serde::Serialize;

use crate::document::{
    read_json, write_json, ChartDocument, Check, ScanDocument, ToolStamp, VerifyDocument, VerifySettings,
};
use crate::source::{check_dimension, parse_point, FieldSource};
use crate::table;
use crate::CliError;

fn say(out: &mut dyn Write, text: std::fmt::Arguments<'_>) {
    // Summaries are best effort; a closed stdout must not fail the run.
    let _ = out.write_fmt(text);
    let _ = out.write_all(b"\n");
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => { say($out, format_args!($($arg)*)) };
}

#[derive(Clone, Debug)]
pub struct ConstructArgs {
    pub field: String,
    pub point: String,
    pub domain_radius: f64,
    pub config: ChartConfig,
    pub output: Option<PathBuf>,
}

pub fn construct(args: &ConstructArgs, out: &mut dyn Write) -> Result<ChartDocument, CliError> {
    let source = FieldSource::parse(&args.field, args.domain_radius)?;
    let field = source.build()?;
    let point = parse_point(&args.point)?;
    check_dimension(&field, &point)?;
    let chart = FlowBoxChart::build(&field, &point, args.config)?;
    let doc = ChartDocument::new(&source, &chart);
    if let Some(path) = &args.output {
        write_json(path, &doc)?;
    }
    say!(out, "field      {source}");
    say!(out, "base point {:?}", doc.base_point);
    say!(out, "r1         {}", doc.r1);
    say!(out, "T          {}", doc.t);
    say!(out, "r2         {}", doc.r2);
    say!(out, "K          {}{}", doc.k, if doc.k_exact { " (exact)" } else { " (estimated)" });
    say!(out, "M          {}", doc.m);
    say!(out, "K_phi      {}", doc.k_phi);
    say!(out, "K_phi_inv  {}", doc.k_phi_inv);
    if let Some(path) = &args.output {
        say!(out, "chart written to {}", path.display());
    }
    Ok(doc)
}

pub fn load_chart(path: &Path) -> Result<(ChartDocument, FlowBoxChart), CliError> {
    let doc: ChartDocument = read_json(path, "chart")?;
    let chart = doc.to_chart()?;
    Ok((doc, chart))
}

#[derive(Clone, Debug)]
pub struct VerifyArgs {
    pub chart: PathBuf,
    pub seed: u64,
    pub samples: usize,
    /// Defaults to `T/2`.
    pub t_max: Option<f64>,
    pub roundtrip_samples: usize,
    pub pairs: usize,
    pub dependence_pairs: usize,
    pub dependence_tolerance: f64,
    pub axiom_samples: usize,
    pub interior_points: usize,
    pub interior_perturbations: usize,
    pub output: Option<PathBuf>,
    pub residuals_csv: Option<PathBuf>,
}

impl VerifyArgs {
    pub fn new(chart: PathBuf) -> Self {
        VerifyArgs {
            chart,
            seed: 0,
            samples: 500,
            t_max: None,
            roundtrip_samples: 1000,
            pairs: 10_000,
            dependence_pairs: 10_000,
            dependence_tolerance: 1e-11,
            axiom_samples: 200,
            interior_points: 20,
            interior_perturbations: 100,
            output: None,
            residuals_csv: None,
        }
    }
}

pub const CONJUGACY_LIMIT: f64 = 1e-6;
pub const ROUNDTRIP_LIMIT: f64 = 1e-7;
pub const SEMIGROUP_LIMIT: f64 = 1e-7;

/// Runs every audit on a stored chart. The report is written even when a
/// check fails; the failure is then returned as a verification error.
pub fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<VerifyDocument, CliError> {
    let (doc, chart) = load_chart(&args.chart)?;
    let seed = args.seed;
    let t_max = args.t_max.unwrap_or(chart.t() / 2.0);
    let n = chart.dimension();
    let origin = vec![0.0; n];

    let conjugacy = verify_conjugacy(&chart, args.samples, t_max, seed)?;
    let roundtrip = roundtrip_audit(&chart, args.roundtrip_samples, seed)?;
    let lipschitz = lipschitz_ratio_scan(&chart, args.pairs, seed)?;
    // Solutions from B(0, r₁/2) stay in B(0, r₁) for |t| ≤ T since ‖f̃‖ < 2.
    let dependence = dependence_audit(
        chart.normalized_field(),
        &DependenceConfig {
            k: chart.k(),
            k_exact: chart.k_is_exact(),
            center: origin.clone(),
            radius: chart.r1() / 2.0,
            pair_count: args.dependence_pairs,
            t_min: -chart.t(),
            t_max: chart.t(),
            seed,
            tolerance: args.dependence_tolerance,
        },
    )?;
    let flow_axioms = flow_axioms_check(
        chart.normalized_field(),
        &origin,
        chart.r1() / 2.0,
        chart.t() / 2.0,
        args.axiom_samples,
        seed,
        chart.integration_tolerance(),
    )?;
    let interior_radius = interior_radius_audit(&chart, args.interior_points, args.interior_perturbations, seed)?;

    let checks = vec![
        Check::at_most("conjugacy residual", conjugacy.max_conjugacy_residual, CONJUGACY_LIMIT),
        Check::at_most("foot point invariance", conjugacy.max_foot_invariance_residual, CONJUGACY_LIMIT),
        Check::at_most("crossing time shift", conjugacy.max_time_shift_residual, CONJUGACY_LIMIT),
        Check::at_most("round trip residual", roundtrip.max_roundtrip_residual, ROUNDTRIP_LIMIT),
        Check::at_most("lipschitz violations", lipschitz.violations as f64, 0.0),
        Check::at_most("dependence violations", dependence.violations as f64, 0.0),
        Check::at_most("flow identity residual", flow_axioms.max_identity_residual, 0.0),
        Check::at_most("flow semigroup residual", flow_axioms.max_semigroup_residual, SEMIGROUP_LIMIT),
        Check::at_most("interior radius failures", interior_radius.failures as f64, 0.0),
    ];
    let passed = checks.iter().all(|c| c.passed);
    let settings = VerifySettings {
        seed,
        conjugacy_samples: args.samples,
        t_max,
        roundtrip_samples: args.roundtrip_samples,
        lipschitz_pairs: args.pairs,
        dependence_pairs: args.dependence_pairs,
        dependence_tolerance: args.dependence_tolerance,
        axiom_samples: args.axiom_samples,
        interior_points: args.interior_points,
        interior_perturbations: args.interior_perturbations,
    };

    if let Some(path) = &args.residuals_csv {
        let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        header.extend(["t", "conjugacy", "roundtrip", "foot", "time_shift"].map(String::from));
        let rows: Vec<Vec<f64>> = conjugacy
            .per_sample
            .iter()
            .map(|s| {
                let mut row = s.x.clone();
                row.extend([s.t, s.conjugacy, s.roundtrip, s.foot, s.time_shift]);
                row
            })
            .collect();
        table::write_rows(path, &header, &rows)?;
    }

    say!(out, "chart {} ({})", doc.fingerprint, doc.field);
    say!(
        out,
        "K = {}{}, T = {}, r2 = {}",
        chart.k(),
        if chart.k_is_exact() { " (exact)" } else { " (estimated)" },
        chart.t(),
        chart.r2()
    );
    say!(
        out,
        "conjugacy samples {} of {} drawn ({} left W1)",
        conjugacy.samples,
        conjugacy.attempts,
        conjugacy.rejected
    );
    say!(out, "max ratio phi {} (bound {}), phi^-1 {} (bound {})", lipschitz.max_ratio_phi, lipschitz.bound_phi, lipschitz.max_ratio_phi_inv, lipschitz.bound_phi_inv);
    for c in &checks {
        say!(out, "{:<26} {:>11.3e}  limit {:>8.1e}  {}", c.name, c.value, c.limit, if c.passed { "ok" } else { "FAIL" });
    }

    let report = VerifyDocument {
        stamp: ToolStamp::current(),
        chart: doc,
        settings,
        conjugacy,
        roundtrip,
        lipschitz,
        dependence,
        flow_axioms,
        interior_radius,
        checks,
        passed,
    };
    if let Some(path) = &args.output {
        write_json(path, &report)?;
        say!(out, "report written to {}", path.display());
    }
    if !passed {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        return Err(CliError::Verification(failed.join(", ")));
    }
    Ok(report)
}

pub fn scan_lipschitz(
    chart_path: &Path,
    pairs: usize,
    seed: u64,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> Result<ScanDocument, CliError> {
    let (doc, chart) = load_chart(chart_path)?;
    let scan = lipschitz_ratio_scan(&chart, pairs, seed)?;
    let passed = scan.violations == 0;
    say!(out, "pairs            {}", scan.pair_count);
    say!(out, "max ratio phi    {} (bound 7e^(KT) = {})", scan.max_ratio_phi, scan.bound_phi);
    say!(out, "max ratio phi^-1 {} (bound 2+2e^(KT) = {})", scan.max_ratio_phi_inv, scan.bound_phi_inv);
    say!(out, "violations       {}", scan.violations);
    if !scan.k_exact {
        say!(out, "K was estimated; the bounds are only as reliable as the estimate");
    }
    let report = ScanDocument { stamp: ToolStamp::current(), chart: doc, scan, passed };
    if let Some(path) = output {
        write_json(path, &report)?;
    }
    if !passed {
        return Err(CliError::Verification(format!("{} Lipschitz bound violations", report.scan.violations)));
    }
    Ok(report)
}

pub const DEMOS: [&str; 3] = ["nondifferentiable-transfer", "discontinuous-1d", "straighten-1d"];

pub const PROBE_STEPS: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

#[derive(Serialize)]
struct DemoReport<T: Serialize> {
    #[serde(flatten)]
    stamp: ToolStamp,
    demo: &'static str,
    seed: u64,
    #[serde(flatten)]
    body: T,
}

fn write_demo<T: Serialize>(
    dir: Option<&Path>,
    demo: &'static str,
    seed: u64,
    body: T,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(format!("{demo}.json"));
        write_json(&path, &DemoReport { stamp: ToolStamp::current(), demo, seed, body })?;
        say!(out, "report written to {}", path.display());
    }
    Ok(())
}

pub fn demo(name: &str, seed: u64, output_dir: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match name {
        "nondifferentiable-transfer" => demo_nondifferentiable(seed, output_dir, out),
        "discontinuous-1d" => demo_discontinuous(seed, output_dir, out),
        "straighten-1d" => demo_straighten(seed, output_dir, out),
        other => Err(CliError::Input(format!("unknown demo {other:?}; available: {}", DEMOS.join(", ")))),
    }
}

fn demo_nondifferentiable(seed: u64, dir: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let config = ChartConfig { seed, ..ChartConfig::default() };
    let chart = FlowBoxChart::build(&builtin::abs_shear(), &[0.0, 0.0], config)?;
    say!(out, "f(x, y) = (1 + |y|, 0) is Lipschitz but not differentiable along y = 0.");
    say!(out, "Its chart map is phi(x, y) = (x / (1 + |y|), y), whose first component has a kink");
    say!(out, "across y = 0 of size 2|x|, so the transfer is a lipeomorphism but not a diffeomorphism.");
    let mut probes: Vec<JacobianJumpReport> = Vec::new();
    for x in [0.05, 0.02, 0.0] {
        let report = nonsmoothness_probe(&chart, &[x, 0.0], 1, &PROBE_STEPS)?;
        say!(out, "probe ({x}, 0) along y:");
        for (h, slopes) in report.step_sizes.iter().zip(&report.one_sided_slopes) {
            say!(out, "  h = {h:e}: d phi1/dy right {:+.9}, left {:+.9}", slopes[0].right, slopes[0].left);
        }
        say!(out, "  estimated jump {:.9} (closed form 2|x| = {})", report.estimated_jump, 2.0 * x);
        probes.push(report);
    }
    #[derive(Serialize)]
    struct Body {
        chart_fingerprint: String,
        probes: Vec<JacobianJumpReport>,
    }
    write_demo(dir, "nondifferentiable-transfer", seed, Body { chart_fingerprint: format!("{:016x}", chart.fingerprint()), probes }, out)
}

fn demo_discontinuous(seed: u64, dir: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let field = builtin::step_field();
    let Regularity::PiecewiseConstant(pieces) = field.regularity().clone() else {
        unreachable!("the step field is piecewise constant")
    };
    say!(out, "f(x) = 1 for x < 1 and 2 for x >= 1 is discontinuous, yet phi(x) = int_0^x ds/f(s)");
    say!(out, "straightens its flow: phi(x) = x for x < 1 and (x + 1)/2 for x >= 1.");
    let mut table = Vec::new();
    for x in [-1.0, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
        let phi = straighten_1d(&field, 0.0, x, 1e-12)?;
        let closed = if x < 1.0 { x } else { (x + 1.0) / 2.0 };
        say!(out, "  phi({x}) = {phi} (closed form {closed})");
        table.push(vec![x, phi, closed]);
    }
    let check = piecewise_conjugacy_check(&pieces, 0.0, (-2.0, 3.0), 1.0, 1000, seed);
    say!(
        out,
        "conjugacy phi(F(x, t)) = phi(x) + t on {} samples: max residual {:e}",
        check.samples,
        check.max_residual
    );
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join("discontinuous-1d.csv");
        table::write_rows(&path, &["x".into(), "phi".into(), "closed_form".into()], &table)?;
        say!(out, "table written to {}", path.display());
    }
    write_demo(dir, "discontinuous-1d", seed, check, out)
}

fn demo_straighten(seed: u64, dir: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let field = builtin::one_plus_xsq();
    let phi = straighten_1d(&field, 0.0, 1.0, 1e-12)?;
    say!(out, "f(x) = 1 + x^2: phi(x) = int_0^x ds/(1 + s^2) = arctan(x).");
    say!(out, "phi(1) = {phi:.10} (pi/4 = {FRAC_PI_4:.10}, error {:e})", (phi - FRAC_PI_4).abs());
    #[derive(Serialize)]
    struct Body {
        phi_at_one: f64,
        exact: f64,
        error: f64,
    }
    write_demo(dir, "straighten-1d", seed, Body { phi_at_one: phi, exact: FRAC_PI_4, error: (phi - FRAC_PI_4).abs() }, out)
}

pub fn straighten(
    field: &str,
    domain_radius: f64,
    from: f64,
    to: f64,
    tolerance: f64,
    out: &mut dyn Write,
) -> Result<f64, CliError> {
    let source = FieldSource::parse(field, domain_radius)?;
    let value = straighten_1d(&source.build()?, from, to, tolerance)?;
    say!(out, "{value}");
    Ok(value)
}

#[derive(Clone, Debug)]
pub struct ExportArgs {
    pub field: String,
    pub point: String,
    pub domain_radius: f64,
    pub time: f64,
    pub tolerance: f64,
    /// Sample count for piecewise constant fields, which are integrated in
    /// closed form.
    pub samples: usize,
    pub output: Option<PathBuf>,
}

pub fn export_trajectory(args: &ExportArgs, out: &mut dyn Write) -> Result<Trajectory, CliError> {
    let source = FieldSource::parse(&args.field, args.domain_radius)?;
    let field = source.build()?;
    let point = parse_point(&args.point)?;
    check_dimension(&field, &point)?;
    let trajectory = match field.regularity() {
        Regularity::PiecewiseConstant(pieces) => piecewise_trajectory(pieces, point[0], args.time, args.samples),
        Regularity::Lipschitz => integrate(&field, &point, args.time, args.tolerance)
            .map_err(|e| CliError::Input(format!("integration failed: {e}")))?,
    };
    match &args.output {
        Some(path) => {
            table::write_trajectory(path, &trajectory)?;
            say!(out, "{} samples written to {}", trajectory.times.len(), path.display());
        }
        None => {
            say!(out, "{}", table::trajectory_header(field.dimension()).join(","));
            for row in table::trajectory_rows(&trajectory) {
                let line: Vec<String> = row.iter().map(f64::to_string).collect();
                say!(out, "{}", line.join(","));
            }
        }
    }
    if trajectory.exited_domain {
        say!(out, "solution left the domain at t = {}", trajectory.final_time());
    }
    Ok(trajectory)
}
