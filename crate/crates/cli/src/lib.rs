//! The `ukg` command line: dataset preparation, rule mining, training,
//! evaluation and prediction over uncertain knowledge graphs.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod splitdir;

use std::io::Write;

use clap::{Parser, Subcommand};

pub use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "ukg", version, about = "Uncertain knowledge graph embeddings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize a scored triple file and split it into a dataset directory.
    Ingest(commands::ingest::IngestArgs),
    /// Generate a synthetic dataset from a latent model.
    Synth(commands::synth::SynthArgs),
    /// Rank candidate length-two rules by hit ratio on strong training facts.
    MineRules(commands::mine::MineArgs),
    /// Train an embedding model.
    Train(commands::train::TrainArgs),
    /// Score a model on confidence prediction, ranking and classification.
    Eval(commands::eval::EvalArgs),
    /// Score a triple or list the best tails for a head and relation.
    Predict(commands::predict::PredictArgs),
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Ingest(args) => commands::ingest::run(args, out),
        Command::Synth(args) => commands::synth::run(args, out),
        Command::MineRules(args) => commands::mine::run(args, out),
        Command::Train(args) => commands::train::run(args, out),
        Command::Eval(args) => commands::eval::run(args, out),
        Command::Predict(args) => commands::predict::run(args, out),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(&cli, out)
}
