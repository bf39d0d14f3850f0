//! Fixtures shared by the benchmarks.

use ukg_core::data::{split_dataset, DatasetSplit, SplitRatios};
use ukg_core::synth::{generate, SynthConfig, SyntheticKg, TransitiveConfig};

/// A latent-model graph with transitive cliques, split 85/7/8.
pub fn fixture(num_entities: usize, num_facts: usize) -> (SyntheticKg, DatasetSplit) {
    let kg = generate(&SynthConfig {
        num_entities,
        num_relations: 8,
        num_facts,
        transitive: Some(TransitiveConfig {
            clusters: num_entities / 10,
            cluster_size: 8,
            ..TransitiveConfig::default()
        }),
        ..SynthConfig::default()
    })
    .expect("valid fixture config");
    let split =
        split_dataset(&kg.facts, SplitRatios::default(), num_entities, 0).expect("fixture splits");
    (kg, split)
}
