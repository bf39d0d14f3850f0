//! Confidence prediction, tail ranking and strong-fact classification.

mod classify;
mod confidence;
mod ranking;

pub use classify::{
    binary_metrics, classify_strong, fit_logistic, ClassificationMetrics, LogisticFit,
};
pub use confidence::{confidence_metrics, ConfidenceMetrics};
pub use ranking::{
    average, build_rank_queries, mean_ndcg, ndcg, ndcg_from_scores, per_query_ndcg, rank_entities,
    Gain, MeanNdcg, QueryNdcg, RankQuery, RelevancePool,
};

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{sample_negatives, DatasetSplit, FactIndex, WeightedTriple};
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalTasks {
    pub confidence: bool,
    pub ranking: bool,
    pub classification: bool,
}

impl Default for EvalTasks {
    fn default() -> Self {
        Self {
            confidence: true,
            ranking: true,
            classification: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub tasks: EvalTasks,
    /// Strong-fact threshold for the classification labels.
    pub tau: f64,
    pub relevance_pool: RelevancePool,
    /// Seeds the negatives drawn for the classifier's training set.
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            tasks: EvalTasks::default(),
            tau: 0.85,
            relevance_pool: RelevancePool::AllSplits,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceReport {
    /// Test facts plus test negatives at target 0.
    pub with_negatives: ConfidenceMetrics,
    pub positives_only: ConfidenceMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    pub linear: MeanNdcg,
    pub exponential: MeanNdcg,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<ConfidenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranking: Option<RankingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationMetrics>,
    #[serde(skip)]
    pub per_query: Vec<QueryNdcg>,
}

impl EvalReport {
    /// `key = value` lines, headline metrics first.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        if let Some(c) = &self.confidence {
            line("mse", format!("{:.6}", c.with_negatives.mse));
            line("mae", format!("{:.6}", c.with_negatives.mae));
            line("confidence_count", c.with_negatives.count.to_string());
            line("mse_positives_only", format!("{:.6}", c.positives_only.mse));
            line("mae_positives_only", format!("{:.6}", c.positives_only.mae));
            line(
                "confidence_positive_count",
                c.positives_only.count.to_string(),
            );
        }
        if let Some(r) = &self.ranking {
            line("ndcg_linear", format!("{:.6}", r.linear.mean));
            line("ndcg_exp", format!("{:.6}", r.exponential.mean));
            line("ranking_queries", r.linear.scored.to_string());
            line("ranking_skipped", r.linear.skipped.to_string());
        }
        if let Some(c) = &self.classification {
            line("f1", format!("{:.6}", c.f1));
            line("accuracy", format!("{:.6}", c.accuracy));
            line("classification_train_count", c.train_count.to_string());
            line("classification_test_count", c.test_count.to_string());
        }
        out
    }
}

/// A predicted confidence and whether the fact is strong.
pub type Labelled = (f64, bool);

/// Classifier inputs: validation facts plus as many sampled negatives for
/// fitting, test facts plus the stored test negatives for scoring.
pub fn classification_data(
    params: &ModelParams,
    split: &DatasetSplit,
    tau: f64,
    seed: u64,
) -> Result<(Vec<Labelled>, Vec<Labelled>)> {
    if split.validation.is_empty() {
        return Err(Error::Evaluation(
            "classification needs validation facts to fit the threshold".into(),
        ));
    }
    let observed: Vec<WeightedTriple> = split.observed().copied().collect();
    let index = FactIndex::new(&observed, tau);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (negatives, _) = sample_negatives(
        &split.validation,
        1,
        &index,
        params.num_entities(),
        &mut rng,
    );

    let label = |f: &WeightedTriple| -> Result<Labelled> {
        Ok((params.confidence(&f.triple)?, f.score > tau))
    };
    let mut train = split
        .validation
        .iter()
        .map(label)
        .collect::<Result<Vec<_>>>()?;
    for t in &negatives {
        train.push((params.confidence(t)?, false));
    }
    let test = split
        .test
        .iter()
        .chain(&split.test_negatives)
        .map(label)
        .collect::<Result<Vec<_>>>()?;
    Ok((train, test))
}

pub fn evaluate(
    params: &ModelParams,
    split: &DatasetSplit,
    options: &EvalOptions,
) -> Result<EvalReport> {
    let mut report = EvalReport::default();
    if options.tasks.confidence {
        report.confidence = Some(ConfidenceReport {
            with_negatives: confidence_metrics(params, &split.test, &split.test_negatives, true)?,
            positives_only: confidence_metrics(params, &split.test, &[], false)?,
        });
    }
    if options.tasks.ranking {
        let queries = build_rank_queries(split, options.relevance_pool);
        let per_query = per_query_ndcg(params, &queries)?;
        report.ranking = Some(RankingReport {
            linear: average(per_query.iter().map(|q| q.linear))?,
            exponential: average(per_query.iter().map(|q| q.exponential))?,
        });
        report.per_query = per_query;
    }
    if options.tasks.classification {
        let (train, test) = classification_data(params, split, options.tau, options.seed)?;
        report.classification = Some(classify_strong(&train, &test)?);
    }
    Ok(report)
}
