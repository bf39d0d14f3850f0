use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Variant;

/// Which parts of the unseen-fact loss are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ablation {
    /// Negation prior plus every grounded rule.
    Full,
    /// No negative sampling: only observed facts contribute.
    NoNegatives,
    /// Negatives are pushed to zero by the negation prior alone.
    NoPsl,
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ablation::Full => "full",
            Ablation::NoNegatives => "no-negatives",
            Ablation::NoPsl => "no-psl",
        })
    }
}

impl FromStr for Ablation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Ablation::Full),
            "no-negatives" => Ok(Ablation::NoNegatives),
            "no-psl" => Ok(Ablation::NoPsl),
            other => Err(Error::Config(format!("unknown ablation `{other}`"))),
        }
    }
}

/// Training hyperparameters. Field names double as config-file keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub dim: usize,
    pub batch_size: usize,
    pub l2_lambda: f64,
    pub negatives_per_positive: usize,
    pub variant: Variant,
    pub ablation: Ablation,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub epsilon: f64,
    pub max_epochs: usize,
    pub eval_every: usize,
    /// Consecutive non-improving validation checks before stopping.
    pub patience: usize,
    pub seed: u64,
    /// Strong-fact threshold used when grounding rule bodies.
    pub tau: f64,
    /// Adds elapsed milliseconds to log records, which makes logs non-reproducible.
    pub record_wall_time: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            dim: 128,
            batch_size: 128,
            l2_lambda: 0.005,
            negatives_per_positive: 2,
            variant: Variant::Rectifier,
            ablation: Ablation::Full,
            adam_beta1: 0.9,
            adam_beta2: 0.99,
            epsilon: 1e-8,
            max_epochs: 2000,
            eval_every: 10,
            patience: 5,
            seed: 0,
            tau: 0.85,
            record_wall_time: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if self.dim == 0 {
            return fail("dim must be at least 1".into());
        }
        if self.batch_size == 0 {
            return fail("batch_size must be at least 1".into());
        }
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return fail(format!(
                "l2_lambda must be non-negative, got {}",
                self.l2_lambda
            ));
        }
        for (name, beta) in [
            ("adam_beta1", self.adam_beta1),
            ("adam_beta2", self.adam_beta2),
        ] {
            if !(beta > 0.0 && beta < 1.0) {
                return fail(format!("{name} must lie in (0, 1), got {beta}"));
            }
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return fail(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.eval_every == 0 {
            return fail("eval_every must be at least 1".into());
        }
        if self.ablation != Ablation::NoNegatives && self.negatives_per_positive == 0 {
            return fail(
                "negatives_per_positive must be at least 1 unless ablation = no-negatives".into(),
            );
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return fail(format!("tau must lie in [0, 1], got {}", self.tau));
        }
        Ok(())
    }

    /// Parses a TOML document, applies `key=value` overrides and validates.
    ///
    /// Override values are read as TOML scalars, falling back to a bare string
    /// so that `variant=logistic` works without quoting.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{item}` is not key=value")))?;
            let key = key.trim();
            let raw = raw.trim();
            let value = format!("v = {raw}")
                .parse::<toml::Table>()
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(raw.to_owned()));
            table.insert(key.to_owned(), value);
        }
        let config: TrainConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Every combination of learning rate in {0.001, 0.005, 0.01}, dimension in
/// {64, 128, 256, 512} and batch size in {128, 256, 512, 1024}, layered over `base`.
pub fn hyperparameter_grid(base: &TrainConfig) -> Vec<TrainConfig> {
    let mut out = Vec::new();
    for &learning_rate in &[0.001, 0.005, 0.01] {
        for &dim in &[64, 128, 256, 512] {
            for &batch_size in &[128, 256, 512, 1024] {
                out.push(TrainConfig {
                    learning_rate,
                    dim,
                    batch_size,
                    ..base.clone()
                });
            }
        }
    }
    out
}
