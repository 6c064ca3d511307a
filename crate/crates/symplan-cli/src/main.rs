//! `symplan-bench`: seeded, paired planning benchmarks from the command
//! line. Exit codes: 0 on completion, 2 on configuration errors, 3 when a
//! theory check fails.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use symplan::geometry::Dim;
use symplan_cli::{
    run_dimension_scaling, run_experiment, verify_theory, ExperimentConfig, ObjectKind,
    PlannerKind, ResourceMode, ScalingConfig,
};

const EXIT_CONFIG: u8 = 2;
const EXIT_THEORY: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "symplan-bench",
    about = "Paired symmetry-aware vs. symmetry-unaware planning benchmarks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run paired experiments over seeded random worlds.
    Run(RunArgs),
    /// Sweep stacked-rectangle spaces m = 1..=M and time the metric.
    Scaling(ScalingArgs),
    /// Run the theory self-checks and report pass/fail.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Ambient dimension; must match the object.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    dim: u8,
    /// Moving object: triangle, pentagon, octagon, N-pyramid, N-prism,
    /// tetrahedron, cube, or rectangle-stack(M).
    #[arg(long)]
    object: String,
    #[arg(long, value_enum)]
    planner: PlannerKind,
    /// Number of random worlds.
    #[arg(long, default_value_t = 10)]
    worlds: usize,
    /// Start/goal pairs per world.
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    /// Resource mode: equal budgets, or reduced aware-arm budgets.
    #[arg(long, value_enum, default_value = "equal")]
    mode: ResourceMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overrides the protocol sample caps.
    #[arg(long)]
    max_samples: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ScalingArgs {
    /// Largest rectangle copy count.
    #[arg(long, default_value_t = 5)]
    max_m: usize,
    #[arg(long, default_value_t = 2)]
    worlds: usize,
    #[arg(long, default_value_t = 10)]
    pairs: usize,
    #[arg(long, value_enum, default_value = "equal")]
    mode: ResourceMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overrides the 40000-sample BiRRT cap.
    #[arg(long)]
    max_samples: Option<usize>,
    /// Distance evaluations per timing point.
    #[arg(long, default_value_t = 200_000)]
    qdist_evals: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn emit(output: &OutputArgs, csv: impl FnOnce(&mut dyn Write) -> symplan::Result<()>, json: String) -> symplan::Result<()> {
    let mut sink: Box<dyn Write> = match &output.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    match output.format {
        OutputFormat::Csv => csv(&mut sink)?,
        OutputFormat::Json => writeln!(sink, "{json}")?,
    }
    sink.flush()?;
    Ok(())
}

fn config_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("configuration error: {message}");
    ExitCode::from(EXIT_CONFIG)
}

fn run(args: RunArgs) -> ExitCode {
    let object: ObjectKind = match args.object.parse() {
        Ok(o) => o,
        Err(e) => return config_error(e),
    };
    let mut config = ExperimentConfig::new(object, args.planner);
    config.dimension = match args.dim {
        2 => Dim::Two,
        _ => Dim::Three,
    };
    config.world = symplan_cli::WorldSettings::defaults(config.dimension);
    config.worlds = args.worlds;
    config.pairs = args.pairs;
    config.mode = args.mode;
    config.seed = args.seed;
    config.max_samples = args.max_samples;
    if let Err(e) = config.validate() {
        return config_error(e);
    }

    let report = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("run failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    eprintln!("{}", report.summary());
    let json = match report.to_json() {
        Ok(j) => j,
        Err(e) => {
            eprintln!("serialization failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    match emit(&args.output, |w| report.write_csv(w), json) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("output failed: {e}");
            ExitCode::FAILURE
        }
    }
}

fn scaling(args: ScalingArgs) -> ExitCode {
    let config = ScalingConfig {
        max_m: args.max_m,
        worlds: args.worlds,
        pairs: args.pairs,
        mode: args.mode,
        seed: args.seed,
        max_samples: args.max_samples,
        qdist_evals: args.qdist_evals,
    };
    if let Err(e) = config.validate() {
        return config_error(e);
    }
    let report = match run_dimension_scaling(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("scaling run failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    eprintln!("{}", report.summary());
    let json = match report.to_json() {
        Ok(j) => j,
        Err(e) => {
            eprintln!("serialization failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    match emit(&args.output, |w| report.write_csv(w), json) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("output failed: {e}");
            ExitCode::FAILURE
        }
    }
}

fn verify(args: VerifyArgs) -> ExitCode {
    let report = match verify_theory(args.seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("verification failed to run: {e}");
            return ExitCode::FAILURE;
        }
    };
    eprintln!("{}", report.summary());
    let json = match report.to_json() {
        Ok(j) => j,
        Err(e) => {
            eprintln!("serialization failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Err(e) = emit(&args.output, |w| report.write_csv(w), json) {
        eprintln!("output failed: {e}");
        return ExitCode::FAILURE;
    }
    if report.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_THEORY)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Scaling(args) => scaling(args),
        Command::Verify(args) => verify(args),
    }
}
