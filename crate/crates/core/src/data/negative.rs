use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{FactIndex, Triple, WeightedTriple};

/// Draws per corrupted slot before a negative is given up on.
pub const MAX_CORRUPTION_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    Head,
    Tail,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerStats {
    pub emitted: usize,
    pub skipped: usize,
}

/// Replaces the head or tail of `triple` with a uniformly drawn entity until
/// the result is not in `index`. Returns `None` after `max_attempts` misses.
pub fn corrupt<R: Rng + ?Sized>(
    triple: Triple,
    slot: Corruption,
    num_entities: usize,
    index: &FactIndex,
    max_attempts: usize,
    rng: &mut R,
) -> Option<Triple> {
    if num_entities == 0 {
        return None;
    }
    for _ in 0..max_attempts {
        let entity = rng.random_range(0..num_entities);
        let candidate = match slot {
            Corruption::Head => Triple {
                head: entity,
                ..triple
            },
            Corruption::Tail => Triple {
                tail: entity,
                ..triple
            },
        };
        if !index.contains(&candidate) {
            return Some(candidate);
        }
    }
    None
}

/// Emits `per_positive` corrupted triples for each fact in `batch`,
/// alternating head and tail corruption and never touching the relation.
pub fn sample_negatives<R: Rng + ?Sized>(
    batch: &[WeightedTriple],
    per_positive: usize,
    index: &FactIndex,
    num_entities: usize,
    rng: &mut R,
) -> (Vec<Triple>, SamplerStats) {
    let mut out = Vec::with_capacity(batch.len() * per_positive);
    let mut stats = SamplerStats::default();
    for fact in batch {
        for j in 0..per_positive {
            let slot = if j % 2 == 0 {
                Corruption::Head
            } else {
                Corruption::Tail
            };
            match corrupt(
                fact.triple,
                slot,
                num_entities,
                index,
                MAX_CORRUPTION_ATTEMPTS,
                rng,
            ) {
                Some(negative) => {
                    out.push(negative);
                    stats.emitted += 1;
                }
                None => stats.skipped += 1,
            }
        }
    }
    (out, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn fact(h: usize, r: usize, t: usize) -> WeightedTriple {
        WeightedTriple::new(Triple::new(h, r, t), 0.9)
    }

    #[test]
    fn one_head_and_one_tail_corruption() {
        let facts = [fact(0, 0, 1), fact(1, 0, 2)];
        let index = FactIndex::new(&facts, 0.85);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (negs, stats) = sample_negatives(&facts[..1], 2, &index, 6, &mut rng);
        assert_eq!(negs.len(), 2);
        assert_eq!(
            stats,
            SamplerStats {
                emitted: 2,
                skipped: 0
            }
        );
        assert_eq!((negs[0].relation, negs[0].tail), (0, 1));
        assert_ne!(negs[0].head, 0);
        assert_eq!((negs[1].head, negs[1].relation), (0, 0));
        assert_ne!(negs[1].tail, 1);
        assert!(negs.iter().all(|n| !index.contains(n)));
    }

    #[test]
    fn saturated_graph_yields_only_skips() {
        let mut facts = Vec::new();
        for h in 0..3 {
            for t in 0..3 {
                facts.push(fact(h, 0, t));
            }
        }
        let index = FactIndex::new(&facts, 0.85);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (negs, stats) = sample_negatives(&facts[..4], 3, &index, 3, &mut rng);
        assert!(negs.is_empty());
        assert_eq!(stats.skipped, 3 * 4);
    }

    #[test]
    fn corrupted_entities_are_uniform() {
        // only the positive itself collides, so heads are uniform over {1, 2, 3, 4}
        let facts = [fact(0, 0, 1)];
        let index = FactIndex::new(&facts, 0.85);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts = [0usize; 5];
        for _ in 0..10_000 {
            let (negs, _) = sample_negatives(&facts, 1, &index, 5, &mut rng);
            counts[negs[0].head] += 1;
        }
        assert_eq!(counts[0], 0);
        let expected = 10_000.0 / 4.0;
        let chi2: f64 = counts[1..]
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let p = 1.0 - ChiSquared::new(3.0).unwrap().cdf(chi2);
        assert!(p > 0.01, "chi2={chi2} p={p} counts={counts:?}");
    }
}
