use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use submodular_certify::extension::{ExtensionPolicy, DEFAULT_BEAM_WIDTH};
use submodular_certify::instance::{Instance, InstanceFile};
use submodular_certify::random::{random_instance, MatroidFamily, ObjectiveFamily, RandomSpec};
use submodular_certify::report::{
    default_policies, render, run_certify, run_curvature, run_extend, run_solve, run_validate,
    Format, Outcome, Report,
};
use submodular_certify::reproduce::{run_reproduce, Target};
use submodular_certify::solver::TiePolicy;
use submodular_certify::Error;

#[derive(Parser)]
#[command(
    name = "subcert",
    version,
    about = "Greedy maximization over matroids with curvature-based certificates"
)]
struct Cli {
    /// Numerical tolerance; overrides the instance file.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Write the report (or generated instance) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    MinIndex,
    EnumerateAll,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Zero,
    Max,
    TargetB,
    Search,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(alias = "task_scheduling")]
    TaskScheduling,
    #[value(alias = "info_gain")]
    InfoGain,
    Coverage,
    Additive,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatroidArg {
    Uniform,
    Partition,
    Explicit,
}

#[derive(Subcommand)]
enum Command {
    /// Check the matroid axioms and polymatroid properties.
    Validate { instance: PathBuf },
    /// Run greedy, and optionally the exhaustive optimum.
    Solve {
        instance: PathBuf,
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value_t = TieArg::MinIndex)]
        tie: TieArg,
    },
    /// Total and matroid curvature.
    Curvature { instance: PathBuf },
    /// Extend the objective from the independent sets to the power set.
    Extend {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = PolicyArg::TargetB)]
        policy: PolicyArg,
        /// Grid points per layer for the search policy.
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// Beam width for the search policy.
        #[arg(long, default_value_t = DEFAULT_BEAM_WIDTH)]
        width: usize,
    },
    /// Full pipeline with every applicable bound.
    Certify {
        instance: PathBuf,
        /// Run a single extension policy instead of all of them.
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_BEAM_WIDTH)]
        width: usize,
    },
    /// Compare computed values with the published reference examples.
    Reproduce {
        /// task-scheduling, adaptive-sensing or counterexample (alias remark1).
        target: String,
    },
    /// Generate a seeded random instance.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = FamilyArg::TaskScheduling)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value_t = MatroidArg::Uniform)]
        matroid: MatroidArg,
        /// Rank of a uniform matroid.
        #[arg(long)]
        rank: Option<usize>,
    },
}

fn policy(p: PolicyArg, grid: usize, width: usize) -> ExtensionPolicy {
    match p {
        PolicyArg::Zero => ExtensionPolicy::Zero,
        PolicyArg::Max => ExtensionPolicy::Max,
        PolicyArg::TargetB => ExtensionPolicy::TargetB,
        PolicyArg::Search => ExtensionPolicy::Search {
            resolution: grid,
            width,
        },
    }
}

struct Output {
    text: String,
    outcome: Outcome,
}

fn emit<R: Report>(report: &R, format: Format) -> Output {
    Output {
        text: render(report, format),
        outcome: report.outcome(),
    }
}

fn load(path: &Path, tolerance: Option<f64>) -> Result<InstanceFile, Error> {
    let mut file = InstanceFile::load(path).map_err(|e| match e {
        Error::Io(io) => Error::Instance {
            context: path.display().to_string(),
            message: io.to_string(),
        },
        Error::Json(j) => Error::Instance {
            context: path.display().to_string(),
            message: j.to_string(),
        },
        other => other,
    })?;
    if tolerance.is_some() {
        file.tolerance = tolerance;
    }
    Ok(file)
}

fn build(path: &Path, tolerance: Option<f64>) -> Result<Instance, Error> {
    load(path, tolerance)?.build()
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    let tol = cli.tolerance;
    Ok(match &cli.command {
        Command::Validate { instance } => emit(&run_validate(&load(instance, tol)?)?, format),
        Command::Solve {
            instance,
            exact,
            tie,
        } => {
            let tie = match tie {
                TieArg::MinIndex => TiePolicy::MinIndex,
                TieArg::EnumerateAll => TiePolicy::EnumerateAll,
            };
            emit(&run_solve(&build(instance, tol)?, *exact, tie)?, format)
        }
        Command::Curvature { instance } => emit(&run_curvature(&build(instance, tol)?)?, format),
        Command::Extend {
            instance,
            policy: p,
            grid,
            width,
        } => emit(
            &run_extend(&build(instance, tol)?, policy(*p, *grid, *width))?,
            format,
        ),
        Command::Certify {
            instance,
            policy: p,
            grid,
            width,
        } => {
            let inst = build(instance, tol)?;
            let policies = match p {
                Some(p) => vec![policy(*p, *grid, *width)],
                None => {
                    let mut all = default_policies(inst.ground.len(), *grid);
                    if let Some(ExtensionPolicy::Search { width: w, .. }) = all.last_mut() {
                        *w = *width;
                    }
                    all
                }
            };
            emit(&run_certify(&inst, &policies)?, format)
        }
        Command::Reproduce { target } => emit(&run_reproduce(target.parse::<Target>()?)?, format),
        Command::Random {
            seed,
            n,
            family,
            matroid,
            rank,
        } => {
            let spec = RandomSpec {
                seed: *seed,
                n: *n,
                family: match family {
                    FamilyArg::TaskScheduling => ObjectiveFamily::TaskScheduling,
                    FamilyArg::InfoGain => ObjectiveFamily::InfoGain,
                    FamilyArg::Coverage => ObjectiveFamily::Coverage,
                    FamilyArg::Additive => ObjectiveFamily::Additive,
                },
                matroid: match matroid {
                    MatroidArg::Uniform => MatroidFamily::Uniform,
                    MatroidArg::Partition => MatroidFamily::Partition,
                    MatroidArg::Explicit => MatroidFamily::Explicit,
                },
                rank: *rank,
            };
            let mut file = random_instance(&spec)?;
            file.tolerance = tol;
            // Fail early on an unusable rank rather than emitting a bad file.
            file.build()?;
            let mut text = file.to_json();
            text.push('\n');
            Output {
                text,
                outcome: Outcome::Ok,
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &out.text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(Outcome::InputError.code() as u8);
                    }
                }
                None => print!("{}", out.text),
            }
            ExitCode::from(out.outcome.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Outcome::for_error(&e).code() as u8)
        }
    }
}
