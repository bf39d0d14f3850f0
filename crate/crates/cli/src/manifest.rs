//! Run manifests: what produced a directory of artifacts and their digests.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub created: String,
    /// Command parameters, including seeds and generator settings.
    pub parameters: serde_json::Value,
    /// Input path to SHA-256 digest.
    pub inputs: BTreeMap<String, String>,
    /// Output file name (relative to the manifest) to SHA-256 digest.
    pub outputs: BTreeMap<String, String>,
}

pub fn digest_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| CliError::file(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            parameters,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let digest = digest_file(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    /// Records every listed file of `dir` and writes `manifest.json` next to them.
    pub fn finish(mut self, dir: &Path, outputs: &[&str]) -> Result<()> {
        for name in outputs {
            self.outputs
                .insert(name.to_string(), digest_file(&dir.join(name))?);
        }
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&self)? + "\n";
        fs::write(&path, text).map_err(|e| CliError::file(&path, e))
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| CliError::file(&path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }

    /// Fails if any recorded output is missing or no longer matches its digest.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        for (name, expected) in &self.outputs {
            let actual = digest_file(&dir.join(name))?;
            if &actual != expected {
                return Err(CliError::Data(format!(
                    "{} was modified after it was written (digest {actual}, manifest {expected})",
                    dir.join(name).display()
                )));
            }
        }
        Ok(())
    }
}
