use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde_json::json;
use ukg_core::data::{split_dataset, Normalization};
use ukg_core::synth::{generate, SynthConfig, TransitiveConfig};

use super::parse_ratios;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::splitdir::{write_facts, SplitDir, SplitMeta};

pub const RULES_FILE: &str = "rules.txt";
pub const HELD_OUT_FILE: &str = "held_out.tsv";

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output split directory.
    #[arg(long)]
    pub out: PathBuf,
    /// TOML generator settings; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub entities: Option<usize>,
    #[arg(long)]
    pub relations: Option<usize>,
    /// Dimension of the latent ground-truth embeddings.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of facts drawn from the latent model.
    #[arg(long)]
    pub facts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Add symmetric cliques over a transitive relation.
    #[arg(long)]
    pub transitive: bool,
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long)]
    pub cluster_size: Option<usize>,
    /// Fraction of rule-implied clique facts withheld.
    #[arg(long)]
    pub holdout: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.85,0.07,0.08")]
    pub ratios: Vec<f64>,
    #[arg(long, default_value_t = 0.85)]
    pub tau: f64,
}

impl SynthArgs {
    pub fn config(&self) -> Result<SynthConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
                toml::from_str(&text)
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
            }
            None => SynthConfig::default(),
        };
        macro_rules! set {
            ($field:ident, $value:expr) => {
                if let Some(v) = $value {
                    config.$field = v;
                }
            };
        }
        set!(num_entities, self.entities);
        set!(num_relations, self.relations);
        set!(dim, self.dim);
        set!(num_facts, self.facts);
        set!(seed, self.seed);
        let wants_cliques = self.transitive
            || self.clusters.is_some()
            || self.cluster_size.is_some()
            || self.holdout.is_some();
        if wants_cliques {
            let t = config
                .transitive
                .get_or_insert_with(TransitiveConfig::default);
            if let Some(v) = self.clusters {
                t.clusters = v;
            }
            if let Some(v) = self.cluster_size {
                t.cluster_size = v;
            }
            if let Some(v) = self.holdout {
                t.holdout = v;
            }
        }
        Ok(config)
    }
}

pub fn run(args: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let ratios = parse_ratios(&args.ratios)?;
    let config = args.config()?;
    let kg = generate(&config)?;
    let split = split_dataset(&kg.facts, ratios, kg.vocab.num_entities(), config.seed)?;
    let meta = SplitMeta::new(
        config.seed,
        ratios,
        args.tau,
        Normalization::Identity,
        &kg.vocab,
        &split,
    );

    fs::create_dir_all(&args.out).map_err(|e| CliError::file(&args.out, e))?;
    let mut extra = Vec::new();
    if config.transitive.is_some() {
        let rules = args.out.join(RULES_FILE);
        fs::write(&rules, &kg.rules).map_err(|e| CliError::file(&rules, e))?;
        write_facts(&args.out.join(HELD_OUT_FILE), &kg.held_out, &kg.vocab)?;
        extra.extend([RULES_FILE, HELD_OUT_FILE]);
    }
    let manifest = RunManifest::new("synth", json!({ "generator": config }));
    let data = SplitDir {
        vocab: kg.vocab,
        split,
        meta,
    };
    data.write(&args.out, manifest, &extra)?;

    writeln!(
        out,
        "{} facts ({} held out) -> {}",
        kg.facts.len(),
        kg.held_out.len(),
        args.out.display()
    )
    .map_err(|e| CliError::Internal(e.to_string()))
}
