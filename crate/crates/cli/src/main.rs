mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{GradcheckOptions, DEFAULT_GRADCHECK_EPSILON, DEFAULT_GRADCHECK_TOLERANCE};
use crate::config::{load_file, Overrides, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "qmllab", version, about = "Hybrid quantum/classical model lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model on the digits data and write its report.
    Train(Common),
    /// Train Baseline QNN, QMLP, QFF and QBP under one budget and tabulate test accuracy.
    Compare(Common),
    /// Run the evolutionary model search.
    Search(Common),
    /// Compare a model's analytic gradients with finite differences.
    Gradcheck {
        #[command(flatten)]
        common: Common,
        /// Pass threshold on the largest absolute deviation.
        #[arg(long, default_value_t = DEFAULT_GRADCHECK_TOLERANCE)]
        tolerance: f64,
        /// Finite-difference step.
        #[arg(long, default_value_t = DEFAULT_GRADCHECK_EPSILON)]
        epsilon: f64,
        /// Debug: replace the parameter-shift constant.
        #[arg(long, hide = true)]
        corrupt_shift: Option<f64>,
    },
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// TOML config with dotted keys such as `train.epochs`; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// qmlp, qff, qbp, baseline, mlp or ff.
    #[arg(long)]
    model: Option<String>,
    /// Digits CSV (64 pixel columns and a label).
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    qubits: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    /// scripted or remote.
    #[arg(long)]
    generator: Option<String>,
    /// URL of the remote generator.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    /// Search evaluation budget: default or ci.
    #[arg(long)]
    profile: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => load_file(path)?,
            None => Default::default(),
        };
        let flags = Overrides {
            model: self.model.clone(),
            data: self.data.clone(),
            seed: self.seed,
            epochs: self.epochs,
            batch: self.batch,
            lr: self.lr,
            qubits: self.qubits,
            depth: self.depth,
            generator: self.generator.clone(),
            endpoint: self.endpoint.clone(),
            population: self.population,
            generations: self.generations,
            profile: self.profile.clone(),
            out: self.out.clone(),
        };
        let env_data = std::env::var_os("QMLLAB_DATA").map(PathBuf::from);
        RunConfig::resolve(&file, &flags, env_data)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(c) => commands::cmd_train(&c.resolve()?),
        Command::Compare(c) => commands::cmd_compare(&c.resolve()?),
        Command::Search(c) => commands::cmd_search(&c.resolve()?),
        Command::Gradcheck {
            common,
            tolerance,
            epsilon,
            corrupt_shift,
        } => {
            if !(tolerance > 0.0) {
                return Err(CliError::Config(format!("--tolerance: {tolerance} must be positive")));
            }
            let opts = GradcheckOptions {
                tolerance,
                epsilon,
                corrupt_shift,
            };
            commands::cmd_gradcheck(&common.resolve()?, &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
