use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flowbox::commands::{self, ConstructArgs, ExportArgs, VerifyArgs};
use flowbox::error::exit;
use flowbox::source::DEFAULT_DOMAIN_RADIUS;
use flowbox_core::flowbox::ChartConfig;

/// Construct and audit flow-box charts of Lipschitz vector fields.
#[derive(Parser)]
#[command(name = "flowbox", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SeedArg {
    /// Seed for every sampled quantity.
    #[arg(long, env = "FLOWBOX_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FieldArgs {
    /// `builtin:<name>` or `dsl:<dimension>:<expression>`.
    #[arg(long)]
    field: String,
    /// Radius of the domain ball of a DSL field, centered at the origin.
    #[arg(long, default_value_t = DEFAULT_DOMAIN_RADIUS)]
    domain_radius: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Build a chart at a base point and write it as JSON.
    Construct {
        #[command(flatten)]
        field: FieldArgs,
        /// Comma-separated base point.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        initial_radius: f64,
        #[arg(long, default_value_t = 2000)]
        radius_samples: usize,
        #[arg(long, default_value_t = 4000)]
        lipschitz_samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        integration_tol: f64,
        #[arg(long, default_value_t = 1e-10)]
        crossing_tol: f64,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Run every audit on a chart file.
    Verify {
        chart: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Also write per-sample conjugacy residuals as CSV.
        #[arg(long)]
        residuals_csv: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        /// Largest |t| in the conjugacy audit; defaults to T/2.
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        roundtrip_samples: usize,
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
        #[arg(long, default_value_t = 10_000)]
        dependence_pairs: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Compare difference ratios of the chart maps with their Lipschitz bounds.
    ScanLipschitz {
        chart: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Worked examples: nondifferentiable-transfer, discontinuous-1d, straighten-1d.
    Demo {
        name: String,
        /// Directory for the demo's JSON and CSV artifacts.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Print the integral of 1/f from --from to --to for a 1-D field.
    #[command(name = "straighten-1d")]
    Straighten1d {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Integrate from a point and write the solution as CSV (t,x1,...,xn).
    ExportTrajectory {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        time: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Sample count for fields integrated in closed form.
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), flowbox::CliError> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Construct {
            field,
            point,
            output,
            initial_radius,
            radius_samples,
            lipschitz_samples,
            integration_tol,
            crossing_tol,
            seed,
        } => {
            let config = ChartConfig {
                initial_radius,
                radius_samples,
                lipschitz_samples,
                seed: seed.seed,
                integration_tolerance: integration_tol,
                crossing_tolerance: crossing_tol,
                ..ChartConfig::default()
            };
            let args =
                ConstructArgs { field: field.field, point, domain_radius: field.domain_radius, config, output };
            commands::construct(&args, &mut out).map(drop)
        }
        Command::Verify {
            chart,
            output,
            residuals_csv,
            samples,
            t_max,
            roundtrip_samples,
            pairs,
            dependence_pairs,
            seed,
        } => {
            let args = VerifyArgs {
                seed: seed.seed,
                samples,
                t_max,
                roundtrip_samples,
                pairs,
                dependence_pairs,
                output,
                residuals_csv,
                ..VerifyArgs::new(chart)
            };
            commands::verify(&args, &mut out).map(drop)
        }
        Command::ScanLipschitz { chart, pairs, output, seed } => {
            commands::scan_lipschitz(&chart, pairs, seed.seed, output.as_deref(), &mut out).map(drop)
        }
        Command::Demo { name, output_dir, seed } => {
            commands::demo(&name, seed.seed, output_dir.as_deref(), &mut out)
        }
        Command::Straighten1d { field, from, to, tol } => {
            commands::straighten(&field.field, field.domain_radius, from, to, tol, &mut out).map(drop)
        }
        Command::ExportTrajectory { field, point, time, tol, samples, output } => {
            let args = ExportArgs {
                field: field.field,
                point,
                domain_radius: field.domain_radius,
                time,
                tolerance: tol,
                samples,
                output,
            };
            commands::export_trajectory(&args, &mut out).map(drop)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the input-error code; clap's own default (2)
            // would collide with the equilibrium code.
            return ExitCode::from(if e.use_stderr() { exit::INPUT } else { exit::PASS });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::PASS),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
