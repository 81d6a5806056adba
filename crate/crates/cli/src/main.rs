//! `dnfrule` command-line interface.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dnfrule::colgen::Mode;

use crate::config::Settings;

#[derive(Parser)]
#[command(name = "dnfrule", version, about = "Learn Boolean DNF rule sets with human-provided rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated dataset as CSV.
    GenData(GenDataArgs),
    /// Train a rule set and save the model.
    Train(TrainArgs),
    /// Score a saved model on a dataset.
    Eval(EvalArgs),
    /// Run a training-size by human-rule-count grid with cross-validation.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
pub struct GenDataArgs {
    /// Generator name.
    #[arg(default_value = "tictactoe")]
    pub name: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

/// Options shared by `train` and `experiment`; they override `--config`.
#[derive(Args, Clone, Default)]
pub struct ParamArgs {
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    /// Complexity budget (total literals).
    #[arg(long)]
    pub complexity: Option<usize>,
    /// Penalty per dropped human rule, as a fraction of the sample count.
    #[arg(long)]
    pub cu: Option<f64>,
    /// Weight of the template distance.
    #[arg(long)]
    pub cp: Option<f64>,
    #[arg(long)]
    pub max_degree: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Quantile bins for numeric features.
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (1 runs sequentially, 0 uses every core).
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl ParamArgs {
    pub fn settings(&self) -> Settings {
        Settings {
            complexity: self.complexity,
            cu: self.cu,
            cp: self.cp,
            max_degree: self.max_degree,
            max_iterations: self.max_iterations,
            mode: self.mode,
            bins: self.bins,
            seed: self.seed,
            jobs: self.jobs,
            ..Settings::default()
        }
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

#[derive(Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "x_wins")]
    pub label: String,
    /// Human rules (soft or hard mode).
    #[arg(long, conflicts_with = "templates")]
    pub rules: Option<PathBuf>,
    /// Partial templates (templates mode).
    #[arg(long)]
    pub templates: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Reference rules to measure similarity against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Report CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Args)]
pub struct ExperimentArgs {
    /// Dataset CSV; the generated tic-tac-toe table when absent.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "x_wins")]
    pub label: String,
    /// Pool of human rules to sample from; the eight tic-tac-toe lines when absent.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Reference rules for similarity; defaults to the rule pool.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Training fractions, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub fractions: Option<Vec<f64>>,
    /// Human rule counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub rule_counts: Option<Vec<usize>>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Record training time per fold (output is then not reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenData(a) => commands::gen_data(&a),
        Command::Train(a) => commands::train(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::Experiment(a) => commands::experiment(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit as u8)
        }
    }
}
