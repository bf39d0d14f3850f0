use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::negative::{corrupt, Corruption};
use super::{FactIndex, Triple, WeightedTriple};
use crate::error::{Error, Result};

const NEGATIVE_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.85,
            validation: 0.07,
            test: 0.08,
        }
    }
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self> {
        let ratios = Self {
            train,
            validation,
            test,
        };
        ratios.validate()?;
        Ok(ratios)
    }

    fn validate(&self) -> Result<()> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::Validation(format!(
                "split ratios {parts:?} must lie in [0, 1]"
            )));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "split ratios sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<WeightedTriple>,
    pub validation: Vec<WeightedTriple>,
    pub test: Vec<WeightedTriple>,
    /// One corrupted triple per test fact, score 0.
    pub test_negatives: Vec<WeightedTriple>,
}

impl DatasetSplit {
    pub fn observed(&self) -> impl Iterator<Item = &WeightedTriple> {
        self.train.iter().chain(&self.validation).chain(&self.test)
    }
}

/// Shuffles with a seeded generator and cuts the facts into train,
/// validation and test partitions, then draws one negative per test fact.
///
/// A partition whose ratio is positive but that would receive no fact is an
/// error; a zero ratio yields an empty partition.
pub fn split_dataset(
    triples: &[WeightedTriple],
    ratios: SplitRatios,
    num_entities: usize,
    seed: u64,
) -> Result<DatasetSplit> {
    ratios.validate()?;
    let mut seen = HashSet::with_capacity(triples.len());
    if let Some(dup) = triples.iter().find(|t| !seen.insert(t.triple)) {
        return Err(Error::Validation(format!(
            "duplicate triple {:?} in split input",
            dup.triple
        )));
    }

    let n = triples.len();
    let n_test = (n as f64 * ratios.test).round() as usize;
    let n_val = (n as f64 * ratios.validation).round() as usize;
    if n_test + n_val > n {
        return Err(Error::Validation(format!(
            "{n} facts are too few for ratios {ratios:?}"
        )));
    }
    let n_train = n - n_test - n_val;
    for (name, ratio, size) in [
        ("train", ratios.train, n_train),
        ("validation", ratios.validation, n_val),
        ("test", ratios.test, n_test),
    ] {
        if ratio > 0.0 && size == 0 {
            return Err(Error::Validation(format!(
                "{n} facts leave the {name} partition empty"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let pick = |range: std::ops::Range<usize>| -> Vec<WeightedTriple> {
        order[range].iter().map(|&i| triples[i]).collect()
    };
    let train = pick(0..n_train);
    let validation = pick(n_train..n_train + n_val);
    let test = pick(n_train + n_val..n);

    let all = FactIndex::new(triples, f64::INFINITY);
    let mut drawn: HashSet<Triple> = HashSet::with_capacity(test.len());
    let mut test_negatives = Vec::with_capacity(test.len());
    for fact in &test {
        let mut found = None;
        for _ in 0..NEGATIVE_ATTEMPTS {
            let slot = if rng.random_bool(0.5) {
                Corruption::Head
            } else {
                Corruption::Tail
            };
            if let Some(candidate) = corrupt(fact.triple, slot, num_entities, &all, 1, &mut rng) {
                if drawn.insert(candidate) {
                    found = Some(candidate);
                    break;
                }
            }
        }
        let negative = found.ok_or_else(|| {
            Error::Validation(format!(
                "could not draw an unseen negative for {:?} after {NEGATIVE_ATTEMPTS} attempts",
                fact.triple
            ))
        })?;
        test_negatives.push(WeightedTriple::new(negative, 0.0));
    }

    Ok(DatasetSplit {
        train,
        validation,
        test,
        test_negatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kg(n: usize) -> Vec<WeightedTriple> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut i = 0usize;
        while out.len() < n {
            let t = Triple::new(i % 40, i % 3, (i * 7 + i / 40) % 40);
            if seen.insert(t) {
                out.push(WeightedTriple::new(t, (i % 10) as f64 / 10.0));
            }
            i += 1;
        }
        out
    }

    #[test]
    fn hundred_facts_split_85_7_8() {
        let facts = kg(100);
        let split = split_dataset(&facts, SplitRatios::default(), 40, 7).unwrap();
        assert_eq!(split.train.len(), 85);
        assert_eq!(split.validation.len(), 7);
        assert_eq!(split.test.len(), 8);
        assert_eq!(split.test_negatives.len(), 8);
        let observed: HashSet<Triple> = facts.iter().map(|f| f.triple).collect();
        for neg in &split.test_negatives {
            assert_eq!(neg.score, 0.0);
            assert!(!observed.contains(&neg.triple));
        }
    }

    #[test]
    fn same_seed_same_split() {
        let facts = kg(100);
        let a = split_dataset(&facts, SplitRatios::default(), 40, 7).unwrap();
        let b = split_dataset(&facts, SplitRatios::default(), 40, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let facts = kg(100);
        let a = split_dataset(&facts, SplitRatios::default(), 40, 7).unwrap();
        let b = split_dataset(&facts, SplitRatios::default(), 40, 8).unwrap();
        let set = |s: &DatasetSplit| s.train.iter().map(|f| f.triple).collect::<HashSet<_>>();
        assert_ne!(set(&a), set(&b));
    }

    #[test]
    fn degenerate_all_train() {
        let facts = kg(10);
        let split = split_dataset(&facts, SplitRatios::new(1.0, 0.0, 0.0).unwrap(), 40, 1).unwrap();
        assert_eq!(split.train.len(), 10);
        assert!(
            split.validation.is_empty() && split.test.is_empty() && split.test_negatives.is_empty()
        );
    }

    #[test]
    fn too_small_is_an_error() {
        let facts = kg(5);
        assert!(split_dataset(&facts, SplitRatios::default(), 40, 1).is_err());
    }

    #[test]
    fn ratios_must_sum_to_one() {
        assert!(SplitRatios::new(0.8, 0.1, 0.05).is_err());
    }

    #[test]
    fn duplicates_are_rejected() {
        let mut facts = kg(20);
        facts.push(facts[0]);
        assert!(split_dataset(&facts, SplitRatios::default(), 40, 1).is_err());
    }

    proptest! {
        #[test]
        fn partitions_cover_input_exactly(n in 30usize..200, seed in any::<u64>()) {
            let facts = kg(n);
            let split = split_dataset(&facts, SplitRatios::default(), 40, seed).unwrap();
            let mut keys: Vec<Triple> = split.observed().map(|f| f.triple).collect();
            prop_assert_eq!(keys.len(), n);
            keys.sort();
            let mut input: Vec<Triple> = facts.iter().map(|f| f.triple).collect();
            input.sort();
            prop_assert_eq!(keys, input);
            prop_assert_eq!(split.test_negatives.len(), split.test.len());
            let exact = |r: f64| n as f64 * r;
            prop_assert!((split.test.len() as f64 - exact(0.08)).abs() <= 1.0);
            prop_assert!((split.validation.len() as f64 - exact(0.07)).abs() <= 1.0);
            prop_assert!((split.train.len() as f64 - exact(0.85)).abs() <= 1.0);
        }
    }
}
