use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use serde_json::json;
use ukg_core::model::{write_model, write_text_export};
use ukg_core::psl::{bind_rules, parse_rules, BoundRule};
use ukg_core::train::{format_log, mse, train_from, TrainConfig};
use ukg_core::ModelParams;

use super::{load_model, MODEL_FILE};
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::splitdir::SplitDir;

pub const MODEL_TEXT_FILE: &str = "model.txt";
pub const LOG_FILE: &str = "train_log.jsonl";
pub const CONFIG_FILE: &str = "config.toml";

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub split: PathBuf,
    /// Soft-logic rule file.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// TOML training configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set dim=64`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory for the model, log and manifest.
    #[arg(long)]
    pub out: PathBuf,
    /// Continue from a saved model (file or training output directory).
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

fn read_rules(args: &TrainArgs, data: &SplitDir) -> Result<Vec<BoundRule>> {
    let Some(path) = &args.rules else {
        return Ok(Vec::new());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
    let rules = parse_rules(&text).map_err(|e| CliError::file(path, e))?;
    bind_rules(&rules, &data.vocab).map_err(|e| CliError::file(path, e))
}

pub fn run(args: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let config_text = match &args.config {
        Some(path) => fs::read_to_string(path).map_err(|e| CliError::file(path, e))?,
        None => String::new(),
    };
    let config = TrainConfig::from_toml_with_overrides(&config_text, &args.overrides)?;
    let data = SplitDir::load(&args.split)?;
    let rules = read_rules(args, &data)?;

    let init = match &args.resume {
        Some(path) => load_model(path, &data.vocab)?,
        None => ModelParams::init(
            data.vocab.num_entities(),
            data.vocab.num_relations(),
            config.dim,
            config.variant,
            config.seed,
        )?,
    };
    let outcome = train_from(&config, &data.split, &rules, &data.vocab, init)?;

    fs::create_dir_all(&args.out).map_err(|e| CliError::file(&args.out, e))?;
    let write =
        |name: &str, f: &dyn Fn(&mut BufWriter<File>) -> ukg_core::Result<()>| -> Result<()> {
            let path = args.out.join(name);
            let file = File::create(&path).map_err(|e| CliError::file(&path, e))?;
            let mut sink = BufWriter::new(file);
            f(&mut sink).map_err(|e| CliError::file(&path, e))?;
            sink.flush().map_err(|e| CliError::file(&path, e))
        };
    write(MODEL_FILE, &|s| {
        write_model(s, &outcome.params, &data.vocab)
    })?;
    write(MODEL_TEXT_FILE, &|s| {
        write_text_export(s, &outcome.params, &data.vocab)
    })?;
    write(LOG_FILE, &|s| {
        Ok(s.write_all(format_log(&outcome.log).as_bytes())?)
    })?;
    write(CONFIG_FILE, &|s| {
        Ok(s.write_all(config.to_toml().as_bytes())?)
    })?;

    let mut manifest = RunManifest::new(
        "train",
        json!({
            "config": config,
            "rules": rules.len(),
            "best_epoch": outcome.best_epoch,
            "epochs_run": outcome.epochs_run,
            "stopped_early": outcome.stopped_early,
        }),
    );
    manifest.add_input(&args.split.join(crate::manifest::MANIFEST_FILE))?;
    for path in [&args.rules, &args.config, &args.resume]
        .into_iter()
        .flatten()
    {
        if path.is_file() {
            manifest.add_input(path)?;
        }
    }
    manifest.finish(
        &args.out,
        &[MODEL_FILE, MODEL_TEXT_FILE, LOG_FILE, CONFIG_FILE],
    )?;

    writeln!(
        out,
        "{} epochs (best {}{}), train mse {:.6} -> {}",
        outcome.epochs_run,
        outcome.best_epoch,
        if outcome.stopped_early {
            ", stopped early"
        } else {
            ""
        },
        mse(&outcome.params, &data.split.train),
        args.out.display()
    )
    .map_err(|e| CliError::Internal(e.to_string()))
}
