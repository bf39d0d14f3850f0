use std::sync::Arc;
use std::time::Instant;

use log::{debug, info};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamConfig, OptimizerState};
use super::config::{Ablation, TrainConfig};
use super::loss::{gradients, LossBreakdown, UnseenRules};
use crate::data::{
    sample_negatives, DatasetSplit, FactIndex, SamplerStats, Vocabulary, WeightedTriple,
};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::psl::{BoundRule, Grounder};

/// One line of the training log, written at every validation check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub j_plus: f64,
    pub j_minus: f64,
    pub reg: f64,
    pub train_mse: f64,
    pub val_mse: Option<f64>,
    pub skipped_negatives: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters at the best validation check (the final ones without validation data).
    pub params: ModelParams,
    pub log: Vec<LogRecord>,
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub stopped_early: bool,
}

/// Mean squared error of the model's confidences against observed scores.
pub fn mse(params: &ModelParams, facts: &[WeightedTriple]) -> f64 {
    if facts.is_empty() {
        return 0.0;
    }
    super::loss::loss_observed(params, facts) / facts.len() as f64
}

/// Shuffled partition of `0..n` into batches of at most `batch_size`.
pub fn epoch_batches(n: usize, batch_size: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
        .chunks(batch_size.max(1))
        .map(<[usize]>::to_vec)
        .collect()
}

/// Trains from a fresh initialization.
pub fn train(
    config: &TrainConfig,
    split: &DatasetSplit,
    rules: &[BoundRule],
    vocab: &Vocabulary,
) -> Result<TrainOutcome> {
    let init = ModelParams::init(
        vocab.num_entities(),
        vocab.num_relations(),
        config.dim,
        config.variant,
        config.seed,
    )?;
    train_from(config, split, rules, vocab, init)
}

/// Trains starting from `init`, which must match the config's dimension and variant.
pub fn train_from(
    config: &TrainConfig,
    split: &DatasetSplit,
    rules: &[BoundRule],
    vocab: &Vocabulary,
    init: ModelParams,
) -> Result<TrainOutcome> {
    config.validate()?;
    if split.train.is_empty() {
        return Err(Error::Validation("training split is empty".into()));
    }
    if init.dim() != config.dim || init.variant() != config.variant {
        return Err(Error::Config(format!(
            "initial model has dim {} / {}, config asks for dim {} / {}",
            init.dim(),
            init.variant(),
            config.dim,
            config.variant
        )));
    }
    if init.num_entities() != vocab.num_entities() || init.num_relations() != vocab.num_relations()
    {
        return Err(Error::Validation(
            "initial model does not match the vocabulary".into(),
        ));
    }
    for fact in split.observed() {
        init.check(&fact.triple)?;
    }
    for rule in rules {
        if rule.head_relation >= vocab.num_relations()
            || rule
                .body
                .iter()
                .any(|a| a.relation >= vocab.num_relations())
        {
            return Err(Error::Validation(format!(
                "rule {} refers to an unknown relation id",
                rule.id
            )));
        }
    }

    let train_index = Arc::new(FactIndex::new(&split.train, config.tau));
    let grounder = Grounder::new(rules.to_vec(), Arc::clone(&train_index));
    let unseen = UnseenRules::for_ablation(config.ablation, Some(&grounder));
    let adam = AdamConfig {
        learning_rate: config.learning_rate,
        beta1: config.adam_beta1,
        beta2: config.adam_beta2,
        epsilon: config.epsilon,
    };

    let mut params = init;
    let mut state = OptimizerState::new(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let started = Instant::now();

    let mut log = Vec::new();
    let mut best: Option<(f64, ModelParams, usize)> = None;
    let mut stale = 0usize;
    let mut stopped_early = false;
    let mut epochs_run = 0;

    for epoch in 1..=config.max_epochs {
        epochs_run = epoch;
        let mut epoch_loss = LossBreakdown::default();
        let mut sampler = SamplerStats::default();
        for batch_ids in epoch_batches(split.train.len(), config.batch_size, &mut rng) {
            let batch: Vec<WeightedTriple> = batch_ids.iter().map(|&i| split.train[i]).collect();
            let negatives = if config.ablation == Ablation::NoNegatives {
                Vec::new()
            } else {
                let (negs, stats) = sample_negatives(
                    &batch,
                    config.negatives_per_positive,
                    &train_index,
                    vocab.num_entities(),
                    &mut rng,
                );
                sampler.emitted += stats.emitted;
                sampler.skipped += stats.skipped;
                negs
            };
            let (loss, grads) = gradients(&params, &batch, &negatives, unseen, config.l2_lambda);
            epoch_loss += loss;
            adam_step(&mut params, &grads, &mut state, &adam);
        }
        if !params.is_finite() {
            return Err(Error::Validation(format!(
                "parameters diverged at epoch {epoch}"
            )));
        }

        if epoch % config.eval_every != 0 && epoch != config.max_epochs {
            continue;
        }
        let val_mse = (!split.validation.is_empty()).then(|| mse(&params, &split.validation));
        let record = LogRecord {
            epoch,
            train_loss: epoch_loss.total(),
            j_plus: epoch_loss.observed,
            j_minus: epoch_loss.unseen,
            reg: epoch_loss.regularization,
            train_mse: mse(&params, &split.train),
            val_mse,
            skipped_negatives: sampler.skipped,
            wall_time_ms: config
                .record_wall_time
                .then(|| started.elapsed().as_millis() as u64),
        };
        debug!("{record:?}");
        log.push(record);

        match val_mse {
            Some(v) => {
                if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                    best = Some((v, params.clone(), epoch));
                    stale = 0;
                } else {
                    stale += 1;
                    if stale >= config.patience {
                        info!(
                            "early stop at epoch {epoch}; best validation MSE at epoch {}",
                            best.as_ref().map_or(0, |b| b.2)
                        );
                        stopped_early = true;
                        break;
                    }
                }
            }
            None => best = Some((f64::NAN, params.clone(), epoch)),
        }
    }

    let (_, params, best_epoch) = best.unwrap_or((f64::NAN, params, epochs_run));
    Ok(TrainOutcome {
        params,
        log,
        best_epoch,
        epochs_run,
        stopped_early,
    })
}

/// Serializes records as JSON lines.
pub fn format_log(log: &[LogRecord]) -> String {
    let mut out = String::new();
    for record in log {
        out.push_str(&serde_json::to_string(record).expect("log record serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Triple;
    use crate::model::Variant;

    #[test]
    fn every_triple_once_per_epoch() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let batches = epoch_batches(23, 5, &mut rng);
        assert_eq!(batches.len(), 5);
        assert_eq!(batches.last().unwrap().len(), 3);
        let mut all: Vec<usize> = batches.concat();
        all.sort();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
    }

    fn toy() -> (Vocabulary, DatasetSplit) {
        let vocab = Vocabulary::from_names((0..8).map(|i| format!("e{i}")), ["r"]).unwrap();
        let train: Vec<WeightedTriple> = (0..6)
            .map(|i| WeightedTriple::new(Triple::new(i, 0, i + 1), 0.5 + 0.05 * i as f64))
            .collect();
        let validation = vec![WeightedTriple::new(Triple::new(6, 0, 7), 0.9)];
        (
            vocab,
            DatasetSplit {
                train,
                validation,
                ..DatasetSplit::default()
            },
        )
    }

    #[test]
    fn patience_counts_non_improving_checks() {
        let (vocab, split) = toy();
        // zero learning signal: constant validation MSE
        let config = TrainConfig {
            dim: 4,
            learning_rate: 1e-300,
            l2_lambda: 0.0,
            eval_every: 1,
            patience: 3,
            max_epochs: 100,
            variant: Variant::Logistic,
            ..TrainConfig::default()
        };
        let out = train(&config, &split, &[], &vocab).unwrap();
        assert!(out.stopped_early);
        assert_eq!(out.log.len(), 4);
        assert_eq!(out.best_epoch, 1);
    }

    #[test]
    fn empty_training_split_is_an_error() {
        let (vocab, mut split) = toy();
        split.train.clear();
        assert!(train(&TrainConfig::default(), &split, &[], &vocab).is_err());
    }

    #[test]
    fn resume_dimension_mismatch_is_an_error() {
        let (vocab, split) = toy();
        let init = ModelParams::init(8, 1, 8, Variant::Rectifier, 0).unwrap();
        let config = TrainConfig {
            dim: 4,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train_from(&config, &split, &[], &vocab, init),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn returned_snapshot_is_best_logged() {
        let (vocab, split) = toy();
        let config = TrainConfig {
            dim: 8,
            learning_rate: 0.05,
            eval_every: 2,
            patience: 2,
            max_epochs: 60,
            batch_size: 2,
            ..TrainConfig::default()
        };
        let out = train(&config, &split, &[], &vocab).unwrap();
        let best = mse(&out.params, &split.validation);
        for record in &out.log {
            assert!(best <= record.val_mse.unwrap());
        }
    }

    #[test]
    fn no_negative_ablation_logs_zero_unseen_loss() {
        let (vocab, split) = toy();
        let config = TrainConfig {
            dim: 4,
            max_epochs: 20,
            ablation: Ablation::NoNegatives,
            ..TrainConfig::default()
        };
        let out = train(&config, &split, &[], &vocab).unwrap();
        assert!(out.log.iter().all(|r| r.j_minus == 0.0));
    }
}
