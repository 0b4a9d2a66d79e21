use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand, ValueEnum};
use fsi_cert::cli::{self, problem_from_args, OutputPaths, RunConfig, Subcommand, Tolerances};
use fsi_cert::solver::EstimateMode;
use fsi_cert::Norm;

/// Convergence certificates and traces for fixed slope iterations.
#[derive(Parser)]
#[command(name = "fsi-cert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Certify a fixture; exits 1 if it cannot be certified.
    Certify(Opts),
    /// Iterate on a fixture and write the trace CSV and a report.
    Solve(Opts),
    /// Compare sufficient conditions for `l0=.. alpha=.. nu=.. eta=.. R=..` or a fixture.
    Compare(Opts),
    /// Tabulate the continuity measure of a fixture as `radius,value` rows.
    EstimateOmega(Opts),
    /// List bundled fixtures and their parameters.
    ListProblems,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Direct,
    Centered,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Max,
    One,
    Two,
}

#[derive(Args)]
struct Opts {
    /// Fixture name or spec file, then `key=value` parameters.
    problem: Vec<String>,
    #[arg(long)]
    norm: Option<NormArg>,
    #[arg(long, default_value_t = Tolerances::default().tol_step)]
    tol_step: f64,
    #[arg(long, default_value_t = Tolerances::default().tol_residual)]
    tol_residual: f64,
    #[arg(long, default_value_t = Tolerances::default().root_tol)]
    root_tol: f64,
    #[arg(long, default_value_t = Tolerances::default().slack_tol)]
    slack_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long, default_value_t = cli::DEFAULT_SEED)]
    seed: u64,
    /// Starts for the uniqueness probe (solve only).
    #[arg(long, default_value_t = 0)]
    num_starts: usize,
    #[arg(long, value_enum, default_value_t = Mode::Direct)]
    mode: Mode,
    /// Number of radii for measure estimates.
    #[arg(long, default_value_t = 64)]
    radii: usize,
    /// Random sphere points per radius.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long)]
    certificate: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn config(subcommand: Subcommand, o: Opts) -> fsi_cert::Result<RunConfig> {
    Ok(RunConfig {
        subcommand,
        problem: problem_from_args(&o.problem)?,
        tolerances: Tolerances {
            tol_step: o.tol_step,
            tol_residual: o.tol_residual,
            root_tol: o.root_tol,
            slack_tol: o.slack_tol,
        },
        max_iter: o.max_iter,
        norm: o.norm.map(|n| match n {
            NormArg::Max => Norm::Max,
            NormArg::One => Norm::One,
            NormArg::Two => Norm::Two,
        }),
        seed: o.seed,
        num_starts: o.num_starts,
        estimate_mode: match o.mode {
            Mode::Direct => EstimateMode::Direct,
            Mode::Centered => EstimateMode::Centered,
        },
        estimate_radii: o.radii,
        estimate_samples: o.samples,
        outputs: OutputPaths {
            certificate: o.certificate,
            trace: o.trace,
            report: o.report,
        },
    })
}

fn main() -> ExitCode {
    let parsed = match Cli::parse().command {
        Command::Certify(o) => config(Subcommand::Certify, o),
        Command::Solve(o) => config(Subcommand::Solve, o),
        Command::Compare(o) => config(Subcommand::Compare, o),
        Command::EstimateOmega(o) => config(Subcommand::EstimateOmega, o),
        Command::ListProblems => Ok(RunConfig::new(Subcommand::ListProblems)),
    };
    let code = match parsed {
        Ok(config) => cli::run(&config, &mut io::stdout().lock(), &mut io::stderr().lock()),
        Err(e) => {
            eprintln!("error: {e}");
            cli::exit_code(&e)
        }
    };
    ExitCode::from(code)
}
