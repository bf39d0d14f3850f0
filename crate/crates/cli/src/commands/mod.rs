pub mod eval;
pub mod ingest;
pub mod mine;
pub mod predict;
pub mod synth;
pub mod train;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use ukg_core::model::{read_model, ModelHeader};
use ukg_core::{ModelParams, Vocabulary};

use crate::error::{CliError, Result};
use crate::manifest::RunManifest;

pub const MODEL_FILE: &str = "model.bin";

/// Accepts a training output directory (manifest checked) or a model file.
pub fn load_model(path: &Path, vocab: &Vocabulary) -> Result<ModelParams> {
    let file: PathBuf = if path.is_dir() {
        RunManifest::load(path)?.verify(path)?;
        path.join(MODEL_FILE)
    } else {
        path.to_path_buf()
    };
    let source = File::open(&file).map_err(|e| CliError::file(&file, e))?;
    let (header, params): (ModelHeader, ModelParams) =
        read_model(BufReader::new(source)).map_err(|e| CliError::file(&file, e))?;
    header
        .check_vocabulary(vocab)
        .map_err(|e| CliError::file(&file, e))?;
    Ok(params)
}

pub(crate) fn parse_ratios(values: &[f64]) -> Result<ukg_core::data::SplitRatios> {
    match values {
        &[train, validation, test] => {
            Ok(ukg_core::data::SplitRatios::new(train, validation, test)?)
        }
        _ => Err(CliError::Usage(format!(
            "--ratios takes three comma-separated values, got {}",
            values.len()
        ))),
    }
}
