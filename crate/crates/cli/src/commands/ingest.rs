use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::json;
use ukg_core::data::{normalize_scores, parse_triples, split_dataset, ColumnSpec, Normalization};
use ukg_core::Vocabulary;

use super::parse_ratios;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::splitdir::{SplitDir, SplitMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationKind {
    Identity,
    MinMax,
    LogMinMax,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Tab-separated triples with a raw confidence column.
    #[arg(long)]
    pub input: PathBuf,
    /// Output split directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Zero-based head, relation, tail and score columns.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub columns: Vec<usize>,
    #[arg(long, value_enum, default_value = "identity")]
    pub normalization: NormalizationKind,
    /// Lower clamp for log-min-max.
    #[arg(long, default_value_t = 0.1)]
    pub lo: f64,
    /// Upper clamp for log-min-max.
    #[arg(long, default_value_t = 3.0)]
    pub hi: f64,
    /// Smallest normalized score for min-max and log-min-max.
    #[arg(long, default_value_t = 0.1)]
    pub floor: f64,
    /// Train, validation and test fractions.
    #[arg(long, value_delimiter = ',', default_value = "0.85,0.07,0.08")]
    pub ratios: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Strong-fact threshold recorded for later commands.
    #[arg(long, default_value_t = 0.85)]
    pub tau: f64,
}

impl IngestArgs {
    fn normalization(&self) -> Normalization {
        match self.normalization {
            NormalizationKind::Identity => Normalization::Identity,
            NormalizationKind::MinMax => Normalization::MinMax { floor: self.floor },
            NormalizationKind::LogMinMax => Normalization::LogMinMax {
                lo: self.lo,
                hi: self.hi,
                floor: self.floor,
            },
        }
    }

    fn columns(&self) -> Result<ColumnSpec> {
        match self.columns[..] {
            [head, relation, tail, score] => Ok(ColumnSpec {
                head,
                relation,
                tail,
                score,
            }),
            _ => Err(CliError::Usage(
                "--columns takes exactly four indices".into(),
            )),
        }
    }
}

pub fn run(args: &IngestArgs, out: &mut dyn Write) -> Result<()> {
    let ratios = parse_ratios(&args.ratios)?;
    let columns = args.columns()?;
    let normalization = args.normalization();

    let file = std::fs::File::open(&args.input).map_err(|e| CliError::file(&args.input, e))?;
    let mut vocab = Vocabulary::new();
    let raw = parse_triples(std::io::BufReader::new(file), &columns, &mut vocab)
        .map_err(|e| CliError::file(&args.input, e))?;
    let facts =
        normalize_scores(&raw, normalization).map_err(|e| CliError::file(&args.input, e))?;
    let split = split_dataset(&facts, ratios, vocab.num_entities(), args.seed)?;
    let meta = SplitMeta::new(args.seed, ratios, args.tau, normalization, &vocab, &split);

    let mut manifest = RunManifest::new("ingest", json!({ "columns": args.columns }));
    manifest.add_input(&args.input)?;
    let data = SplitDir { vocab, split, meta };
    data.write(&args.out, manifest, &[])?;

    writeln!(
        out,
        "{} facts, {} entities, {} relations -> {} (train {}, valid {}, test {}, negatives {})",
        facts.len(),
        data.vocab.num_entities(),
        data.vocab.num_relations(),
        args.out.display(),
        data.meta.counts.train,
        data.meta.counts.validation,
        data.meta.counts.test,
        data.meta.counts.test_negatives,
    )
    .map_err(|e| CliError::Internal(e.to_string()))
}
