//! `cellplan`: plan, evaluate and inspect two-tier mmWave deployments.

mod commands;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cellplan::backhaul::FiberAssignmentMode;
use cellplan::InterferenceMode;

#[derive(Debug, Parser)]
#[command(name = "cellplan", version, about = "Two-tier mmWave cell and fiber backhaul planner")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// Worker threads for evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cell planning: minimize unsatisfied users and BS cost.
    Plan(PlanArgs),
    /// Joint cell and fiber backhaul planning over existing FAPs.
    Jointplan(JointArgs),
    /// Re-evaluate a layout file.
    Evaluate(LayoutArgs),
    /// SINR, SNR and rate coverage curves of a layout.
    Coverage(LayoutArgs),
    /// Closed-form BS counts for a scenario.
    Sizing(SizingArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    NoiseLimited,
    Interference,
}

impl From<ModeArg> for InterferenceMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::NoiseLimited => InterferenceMode::NoiseLimited,
            ModeArg::Interference => InterferenceMode::Interference,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FiberArg {
    Repair,
    Genetic,
}

impl From<FiberArg> for FiberAssignmentMode {
    fn from(f: FiberArg) -> Self {
        match f {
            FiberArg::Repair => FiberAssignmentMode::Repair,
            FiberArg::Genetic => FiberAssignmentMode::Genetic,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Scenario JSON file, or a bundled name (scenario1, scenario2, scenario3, blockage).
    #[arg(long)]
    pub scenario: String,
    /// Rescale subarea populations to this expected user total.
    #[arg(long)]
    pub users: Option<u64>,
    /// Override the pixel size (m).
    #[arg(long)]
    pub pixel_size: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct RadioArgs {
    /// Interference handling.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Deterministic obstacle blockage (default: on when the scenario has obstacles).
    #[arg(long, value_enum)]
    pub blockage: Option<OnOff>,
}

#[derive(Debug, Clone, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub radio: RadioArgs,
    /// Master seed (default: the scenario's rng_seed).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of iterations.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Population size.
    #[arg(long)]
    pub pop: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also draw every exported layout as SVG.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
pub struct JointArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Replace the scenario's FAPs by this many uniform random ones.
    #[arg(long)]
    pub random_faps: Option<usize>,
    /// How W-BSs are assigned to FAPs.
    #[arg(long, value_enum)]
    pub fiber_assignment: Option<FiberArg>,
}

#[derive(Debug, Clone, Args)]
pub struct LayoutArgs {
    /// Layout file written by plan or jointplan.
    #[arg(long)]
    pub layout: PathBuf,
    #[command(flatten)]
    pub radio: RadioArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SizingArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

/// An error with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Self { code: 1, error }
    }
}

impl From<std::io::Error> for Failure {
    fn from(error: std::io::Error) -> Self {
        Self::new(1, error)
    }
}

pub const EXIT_ARGS: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_SIZING: u8 = 3;
pub const EXIT_FIBER: u8 = 4;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ARGS } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_ARGS);
        }
    }

    let result = match cli.command {
        Command::Plan(a) => commands::plan(&a, None),
        Command::Jointplan(a) => commands::plan(&a.plan, Some(&a)),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Coverage(a) => commands::coverage(&a),
        Command::Sizing(a) => commands::sizing(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
