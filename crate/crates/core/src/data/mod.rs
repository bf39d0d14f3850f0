//! Weighted triples, vocabularies, fact indexes and dataset splits.

mod index;
mod io;
mod negative;
mod normalize;
mod split;
mod vocab;

pub use index::FactIndex;
pub use io::{parse_triples, read_triple_file, write_triples, ColumnSpec};
pub use negative::{corrupt, sample_negatives, Corruption, SamplerStats, MAX_CORRUPTION_ATTEMPTS};
pub use normalize::{normalize_scores, Normalization};
pub use split::{split_dataset, DatasetSplit, SplitRatios};
pub use vocab::Vocabulary;

use serde::{Deserialize, Serialize};

/// A `(head, relation, tail)` key over dense vocabulary ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
}

impl Triple {
    pub const fn new(head: usize, relation: usize, tail: usize) -> Self {
        Self {
            head,
            relation,
            tail,
        }
    }
}

/// A triple with its confidence score in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedTriple {
    pub triple: Triple,
    pub score: f64,
}

impl WeightedTriple {
    pub const fn new(triple: Triple, score: f64) -> Self {
        Self { triple, score }
    }
}

/// A triple as read from disk, before score normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawTriple {
    pub triple: Triple,
    pub raw_score: f64,
}
