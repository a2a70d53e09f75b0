//! Front end for the `falc` binary: run configs, problem construction and
//! the solve / generate / bench commands.

pub mod build;
pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{aggregate, run_bench, run_generate, run_solve, BenchSummary};
pub use config::{Command, Format, Overrides, ProblemConfig, RunConfig, ScheduleFlag};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "falc", version, about = "First-order augmented Lagrangian solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Solve one problem and write report.json, history.csv and metrics.
    Solve(RunArgs),
    /// Write a random robust PCA / stable PCP instance directory.
    Generate(RunArgs),
    /// Solve several seeded instances and summarize the recovery metrics.
    Bench(RunArgs),
    /// Run whatever command the config file names.
    Run(RunArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct RunArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// robust_pca, stable_pcp, matrix_completion or basis_pursuit.
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_enum)]
    pub schedule: Option<ScheduleFlag>,
    /// Geometric decay rate; implies --schedule geometric.
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub c_lambda: Option<f64>,
    #[arg(long)]
    pub max_outer: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Print one line per outer iteration to stderr.
    #[arg(long)]
    pub verbose: bool,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            problem: self.problem.clone(),
            n: self.n,
            seed: self.seed,
            output: self.output.clone(),
            trials: self.trials,
            schedule: self.schedule,
            nu: self.nu,
            c_lambda: self.c_lambda,
            max_outer: self.max_outer,
            format: self.format,
        }
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn execute(cli: Cli) -> i32 {
    let (command, args) = match cli.command {
        Sub::Solve(a) => (Some(Command::Solve), a),
        Sub::Generate(a) => (Some(Command::Generate), a),
        Sub::Bench(a) => (Some(Command::Bench), a),
        Sub::Run(a) => (None, a),
    };
    match dispatch(command, &args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("falc: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Option<Command>, args: &RunArgs) -> Result<i32, CliError> {
    let command = match command {
        Some(c) => c,
        None => {
            let path = args
                .config
                .as_deref()
                .ok_or_else(|| CliError::Config("run needs --config".into()))?;
            RunConfig::load(path)?.command
        }
    };
    let cfg = RunConfig::resolve(command, args.config.as_deref(), &args.overrides())?;
    match cfg.command {
        Command::Solve => run_solve(&cfg, args.verbose),
        Command::Generate => run_generate(&cfg),
        Command::Bench => run_bench(&cfg, args.verbose).map(|(code, _)| code),
    }
}
