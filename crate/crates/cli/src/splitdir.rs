//! On-disk layout of a prepared dataset.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use ukg_core::data::{
    normalize_scores, parse_triples, write_triples, ColumnSpec, DatasetSplit, Normalization,
    SplitRatios,
};
use ukg_core::{Vocabulary, WeightedTriple};

use crate::error::{CliError, Result};
use crate::manifest::RunManifest;

pub const TRAIN: &str = "train.tsv";
pub const VALID: &str = "valid.tsv";
pub const TEST: &str = "test.tsv";
pub const TEST_NEG: &str = "test_neg.tsv";
pub const ENTITIES: &str = "entities.tsv";
pub const RELATIONS: &str = "relations.tsv";
pub const META: &str = "meta.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
    pub test_negatives: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitMeta {
    pub seed: u64,
    pub ratios: SplitRatios,
    /// Strong-fact threshold used downstream by rules and classification.
    pub tau: f64,
    pub normalization: Normalization,
    pub entity_hash: String,
    pub relation_hash: String,
    pub counts: SplitCounts,
}

impl SplitMeta {
    pub fn new(
        seed: u64,
        ratios: SplitRatios,
        tau: f64,
        normalization: Normalization,
        vocab: &Vocabulary,
        split: &DatasetSplit,
    ) -> Self {
        Self {
            seed,
            ratios,
            tau,
            normalization,
            entity_hash: hex::encode(vocab.entity_hash()),
            relation_hash: hex::encode(vocab.relation_hash()),
            counts: SplitCounts {
                train: split.train.len(),
                validation: split.validation.len(),
                test: split.test.len(),
                test_negatives: split.test_negatives.len(),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct SplitDir {
    pub vocab: Vocabulary,
    pub split: DatasetSplit,
    pub meta: SplitMeta,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::file(path, e))
}

pub(crate) fn write_facts(path: &Path, facts: &[WeightedTriple], vocab: &Vocabulary) -> Result<()> {
    let mut sink = create(path)?;
    write_triples(&mut sink, facts, vocab).map_err(|e| CliError::file(path, e))?;
    sink.flush().map_err(|e| CliError::file(path, e))
}

fn write_names<'a>(path: &Path, names: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut sink = create(path)?;
    for name in names {
        writeln!(sink, "{name}").map_err(|e| CliError::file(path, e))?;
    }
    sink.flush().map_err(|e| CliError::file(path, e))
}

fn read_names(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| CliError::file(path, e))?;
    BufReader::new(file)
        .lines()
        .map(|l| l.map_err(|e| CliError::file(path, e)))
        .collect()
}

/// Reads a split file whose names must all be in `vocab` and whose scores
/// are already normalized.
pub(crate) fn read_facts(path: &Path, vocab: &Vocabulary) -> Result<Vec<WeightedTriple>> {
    let file = File::open(path).map_err(|e| CliError::file(path, e))?;
    let mut scratch = vocab.clone();
    let raw = parse_triples(BufReader::new(file), &ColumnSpec::default(), &mut scratch)
        .map_err(|e| CliError::file(path, e))?;
    if scratch.num_entities() != vocab.num_entities()
        || scratch.num_relations() != vocab.num_relations()
    {
        return Err(CliError::Data(format!(
            "{}: names outside the dataset vocabulary",
            path.display()
        )));
    }
    normalize_scores(&raw, Normalization::Identity).map_err(|e| CliError::file(path, e))
}

impl SplitDir {
    /// Writes all dataset files plus a manifest recording their digests and
    /// those of `extra` files already present in `dir`.
    pub fn write(&self, dir: &Path, mut manifest: RunManifest, extra: &[&str]) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| CliError::file(dir, e))?;
        write_facts(&dir.join(TRAIN), &self.split.train, &self.vocab)?;
        write_facts(&dir.join(VALID), &self.split.validation, &self.vocab)?;
        write_facts(&dir.join(TEST), &self.split.test, &self.vocab)?;
        write_facts(&dir.join(TEST_NEG), &self.split.test_negatives, &self.vocab)?;
        write_names(&dir.join(ENTITIES), self.vocab.entities())?;
        write_names(&dir.join(RELATIONS), self.vocab.relations())?;
        let meta_path = dir.join(META);
        fs::write(&meta_path, serde_json::to_string_pretty(&self.meta)? + "\n")
            .map_err(|e| CliError::file(&meta_path, e))?;
        manifest.parameters["split"] = serde_json::to_value(&self.meta)?;
        let mut outputs = vec![TRAIN, VALID, TEST, TEST_NEG, ENTITIES, RELATIONS, META];
        outputs.extend_from_slice(extra);
        manifest.finish(dir, &outputs)
    }

    /// Loads a dataset after checking its manifest digests and vocabulary hashes.
    pub fn load(dir: &Path) -> Result<Self> {
        if !dir.is_dir() {
            return Err(CliError::Data(format!(
                "split directory {} does not exist",
                dir.display()
            )));
        }
        RunManifest::load(dir)?.verify(dir)?;
        let meta_path = dir.join(META);
        let meta: SplitMeta = serde_json::from_str(
            &fs::read_to_string(&meta_path).map_err(|e| CliError::file(&meta_path, e))?,
        )
        .map_err(|e| CliError::Data(format!("{}: {e}", meta_path.display())))?;

        let vocab = Vocabulary::from_names(
            read_names(&dir.join(ENTITIES))?,
            read_names(&dir.join(RELATIONS))?,
        )?;
        if hex::encode(vocab.entity_hash()) != meta.entity_hash
            || hex::encode(vocab.relation_hash()) != meta.relation_hash
        {
            return Err(CliError::Data(format!(
                "{}: vocabulary does not match the hashes in {META}",
                dir.display()
            )));
        }
        let split = DatasetSplit {
            train: read_facts(&dir.join(TRAIN), &vocab)?,
            validation: read_facts(&dir.join(VALID), &vocab)?,
            test: read_facts(&dir.join(TEST), &vocab)?,
            test_negatives: read_facts(&dir.join(TEST_NEG), &vocab)?,
        };
        Ok(Self { vocab, split, meta })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ukg_core::Triple;

    fn sample() -> SplitDir {
        let vocab = Vocabulary::from_names(["a", "b", "c"], ["r"]).unwrap();
        let f = |h, t, s| WeightedTriple::new(Triple::new(h, 0, t), s);
        let split = DatasetSplit {
            train: vec![f(0, 1, 0.9), f(1, 2, 0.3)],
            validation: vec![f(2, 0, 0.5)],
            test: vec![f(0, 2, 0.7)],
            test_negatives: vec![f(2, 2, 0.0)],
        };
        let meta = SplitMeta::new(
            7,
            SplitRatios::default(),
            0.85,
            Normalization::Identity,
            &vocab,
            &split,
        );
        SplitDir { vocab, split, meta }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let data = sample();
        data.write(
            dir.path(),
            RunManifest::new("test", serde_json::json!({})),
            &[],
        )
        .unwrap();
        let loaded = SplitDir::load(dir.path()).unwrap();
        assert_eq!(loaded.split, data.split);
        assert_eq!(loaded.meta, data.meta);
        assert_eq!(loaded.vocab.entity_hash(), data.vocab.entity_hash());
    }

    #[test]
    fn edited_files_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        sample()
            .write(
                dir.path(),
                RunManifest::new("test", serde_json::json!({})),
                &[],
            )
            .unwrap();
        fs::write(dir.path().join(ENTITIES), "a\nb\nd\n").unwrap();
        assert!(SplitDir::load(dir.path()).is_err());
        assert!(SplitDir::load(&dir.path().join("missing")).is_err());
    }
}
