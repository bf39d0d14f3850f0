//! Synthetic uncertain knowledge graphs with a known ground truth.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Triple, Vocabulary, WeightedTriple};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Variant};

pub const TRANSITIVE_RELATION: &str = "similar_to";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub num_entities: usize,
    pub num_relations: usize,
    pub dim: usize,
    /// Facts drawn from the latent model.
    pub num_facts: usize,
    pub w: f64,
    pub b: f64,
    pub seed: u64,
    pub transitive: Option<TransitiveConfig>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            num_entities: 20,
            num_relations: 3,
            dim: 8,
            num_facts: 50,
            w: 4.0,
            b: 0.0,
            seed: 0,
            transitive: None,
        }
    }
}

/// Symmetric cliques over one extra relation. Every pair inside a clique is
/// implied by the transitive rule; a fraction of them is withheld.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransitiveConfig {
    pub clusters: usize,
    pub cluster_size: usize,
    pub holdout: f64,
    pub min_score: f64,
    pub max_score: f64,
}

impl Default for TransitiveConfig {
    fn default() -> Self {
        Self {
            clusters: 4,
            cluster_size: 5,
            holdout: 0.3,
            min_score: 0.9,
            max_score: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticKg {
    pub vocab: Vocabulary,
    pub facts: Vec<WeightedTriple>,
    /// Rule-implied facts removed from `facts`.
    pub held_out: Vec<WeightedTriple>,
    /// Rule file text for the transitive relation, empty without one.
    pub rules: String,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.num_entities < 2 {
            return bad("synthetic graph needs at least two entities".into());
        }
        if self.dim == 0 {
            return bad("latent dimension must be positive".into());
        }
        if self.num_facts > 0 && self.num_relations == 0 {
            return bad("latent facts need at least one relation".into());
        }
        let capacity = self.num_entities * self.num_entities * self.num_relations;
        if self.num_facts > capacity {
            return bad(format!(
                "{} facts requested but only {capacity} triples exist",
                self.num_facts
            ));
        }
        if !(self.w.is_finite() && self.b.is_finite()) {
            return bad("map parameters must be finite".into());
        }
        if let Some(t) = &self.transitive {
            if t.cluster_size < 3 {
                return bad("transitive clusters need at least three members".into());
            }
            if t.clusters * t.cluster_size > self.num_entities {
                return bad(format!(
                    "{} clusters of {} exceed {} entities",
                    t.clusters, t.cluster_size, self.num_entities
                ));
            }
            if !(0.0..1.0).contains(&t.holdout) {
                return bad(format!("holdout fraction {} outside [0, 1)", t.holdout));
            }
            if !(0.0 < t.min_score && t.min_score <= t.max_score && t.max_score <= 1.0) {
                return bad("transitive scores need 0 < min_score <= max_score <= 1".into());
            }
        }
        Ok(())
    }
}

pub fn generate(config: &SynthConfig) -> Result<SyntheticKg> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let entity_names: Vec<String> = (0..config.num_entities).map(|i| format!("e{i}")).collect();
    let mut relation_names: Vec<String> =
        (0..config.num_relations).map(|i| format!("r{i}")).collect();
    if config.transitive.is_some() {
        relation_names.push(TRANSITIVE_RELATION.to_string());
    }
    let vocab = Vocabulary::from_names(entity_names, relation_names)?;

    let mut draw = |n: usize| -> Vec<f64> {
        (0..n * config.dim)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect()
    };
    let entities = draw(config.num_entities);
    let relations = draw(config.num_relations.max(1));
    let latent = ModelParams::from_parts(
        config.dim,
        Variant::Logistic,
        entities,
        relations,
        config.w,
        config.b,
    )?;
    let mut facts = Vec::with_capacity(config.num_facts);
    let mut seen = HashSet::new();
    while facts.len() < config.num_facts {
        let triple = Triple::new(
            rng.random_range(0..config.num_entities),
            rng.random_range(0..config.num_relations),
            rng.random_range(0..config.num_entities),
        );
        if seen.insert(triple) {
            facts.push(WeightedTriple::new(triple, latent.confidence(&triple)?));
        }
    }

    let mut held_out = Vec::new();
    let mut rules = String::new();
    if let Some(t) = &config.transitive {
        let relation = config.num_relations;
        let (observed, hidden) = cliques(t, relation, &mut rng);
        facts.extend(observed);
        held_out = hidden;
        rules = format!(
            "(A, {r}, B) & (B, {r}, C) => (A, {r}, C)\n",
            r = TRANSITIVE_RELATION
        );
    }
    Ok(SyntheticKg {
        vocab,
        facts,
        held_out,
        rules,
    })
}

fn cliques(
    config: &TransitiveConfig,
    relation: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<WeightedTriple>, Vec<WeightedTriple>) {
    let mut observed = Vec::new();
    let mut hidden = Vec::new();
    for c in 0..config.clusters {
        let members: Vec<usize> =
            (c * config.cluster_size..(c + 1) * config.cluster_size).collect();
        let mut pairs = Vec::new();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                pairs.push((a, b, rng.random_range(config.min_score..=config.max_score)));
            }
        }
        pairs.shuffle(rng);
        let quota = (config.holdout * pairs.len() as f64).round() as usize;

        // A pair is withheld only if some middle entity still links both ends.
        let mut kept: HashSet<(usize, usize)> = pairs.iter().map(|&(a, b, _)| (a, b)).collect();
        let linked = |kept: &HashSet<(usize, usize)>, x: usize, y: usize| {
            kept.contains(&(x.min(y), x.max(y)))
        };
        let mut withheld = HashSet::new();
        for &(a, b, _) in &pairs {
            if withheld.len() == quota {
                break;
            }
            kept.remove(&(a, b));
            let supported = members
                .iter()
                .any(|&m| m != a && m != b && linked(&kept, a, m) && linked(&kept, m, b));
            if supported {
                withheld.insert((a, b));
            } else {
                kept.insert((a, b));
            }
        }

        for &(a, b, s) in &pairs {
            let both = [
                WeightedTriple::new(Triple::new(a, relation, b), s),
                WeightedTriple::new(Triple::new(b, relation, a), s),
            ];
            if withheld.contains(&(a, b)) {
                hidden.extend(both);
            } else {
                observed.extend(both);
            }
        }
    }
    (observed, hidden)
}
