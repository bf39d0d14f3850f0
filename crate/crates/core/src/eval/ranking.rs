//! Tail ranking quality as mean nDCG over `(head, relation, ?)` queries.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DatasetSplit;
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gain {
    /// `gain(r) = r`
    Linear,
    /// `gain(r) = 2^r - 1`
    Exponential,
}

impl Gain {
    pub fn apply(self, relevance: f64) -> f64 {
        match self {
            Gain::Linear => relevance,
            Gain::Exponential => relevance.exp2() - 1.0,
        }
    }
}

/// Where relevance labels for a query come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelevancePool {
    /// Observed scores from train, validation and test.
    #[default]
    AllSplits,
    TestOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankQuery {
    pub head: usize,
    pub relation: usize,
    /// Ground-truth score per relevant tail; absent tails have relevance 0.
    pub relevance: BTreeMap<usize, f64>,
}

/// Entity ids sorted by descending score; ties go to the smaller id.
pub fn rank_entities(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

fn discount(position: usize) -> f64 {
    1.0 / ((position + 1) as f64).log2()
}

/// nDCG of the ranking induced by `scores`, or `None` when the ideal DCG is zero.
pub fn ndcg_from_scores(
    scores: &[f64],
    relevance: &BTreeMap<usize, f64>,
    gain: Gain,
) -> Option<f64> {
    let mut ideal: Vec<f64> = relevance.values().copied().filter(|&r| r > 0.0).collect();
    ideal.sort_by(|a, b| b.total_cmp(a));
    let ideal_dcg: f64 = ideal
        .iter()
        .enumerate()
        .map(|(i, &r)| gain.apply(r) * discount(i + 1))
        .sum();
    if ideal_dcg <= 0.0 {
        return None;
    }
    let dcg: f64 = rank_entities(scores)
        .iter()
        .enumerate()
        .filter_map(|(i, e)| relevance.get(e).map(|&r| gain.apply(r) * discount(i + 1)))
        .sum();
    Some(dcg / ideal_dcg)
}

pub fn ndcg(query: &RankQuery, params: &ModelParams, gain: Gain) -> Result<Option<f64>> {
    let scores = params.tail_confidences(query.head, query.relation)?;
    Ok(ndcg_from_scores(&scores, &query.relevance, gain))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanNdcg {
    pub mean: f64,
    pub scored: usize,
    pub skipped: usize,
}

/// Per-query nDCG under both gains; `None` marks a skipped query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryNdcg {
    pub head: usize,
    pub relation: usize,
    pub linear: Option<f64>,
    pub exponential: Option<f64>,
}

/// Scores every query once and reports nDCG under both gains. Queries run
/// in parallel; results keep the input order.
pub fn per_query_ndcg(params: &ModelParams, queries: &[RankQuery]) -> Result<Vec<QueryNdcg>> {
    queries
        .par_iter()
        .map(|q| {
            let scores = params.tail_confidences(q.head, q.relation)?;
            Ok(QueryNdcg {
                head: q.head,
                relation: q.relation,
                linear: ndcg_from_scores(&scores, &q.relevance, Gain::Linear),
                exponential: ndcg_from_scores(&scores, &q.relevance, Gain::Exponential),
            })
        })
        .collect()
}

/// Arithmetic mean over scorable values; skipped ones are counted separately.
pub fn average(values: impl IntoIterator<Item = Option<f64>>) -> Result<MeanNdcg> {
    let (mut sum, mut scored, mut skipped) = (0.0, 0usize, 0usize);
    for v in values {
        match v {
            Some(v) => {
                sum += v;
                scored += 1;
            }
            None => skipped += 1,
        }
    }
    if scored == 0 {
        return Err(Error::Evaluation(format!(
            "no scorable ranking query ({skipped} skipped)"
        )));
    }
    Ok(MeanNdcg {
        mean: sum / scored as f64,
        scored,
        skipped,
    })
}

pub fn mean_ndcg(params: &ModelParams, queries: &[RankQuery], gain: Gain) -> Result<MeanNdcg> {
    let per_query = per_query_ndcg(params, queries)?;
    average(per_query.iter().map(|q| match gain {
        Gain::Linear => q.linear,
        Gain::Exponential => q.exponential,
    }))
}

/// One query per distinct `(head, relation)` in the test split, in order of
/// first appearance, labelled from the chosen pool of observed facts.
pub fn build_rank_queries(split: &DatasetSplit, pool: RelevancePool) -> Vec<RankQuery> {
    let mut labels: HashMap<(usize, usize), BTreeMap<usize, f64>> = HashMap::new();
    let source: Box<dyn Iterator<Item = _>> = match pool {
        RelevancePool::AllSplits => Box::new(split.observed()),
        RelevancePool::TestOnly => Box::new(split.test.iter()),
    };
    for fact in source {
        let t = fact.triple;
        labels
            .entry((t.head, t.relation))
            .or_default()
            .insert(t.tail, fact.score);
    }

    let mut seen = std::collections::HashSet::new();
    split
        .test
        .iter()
        .filter(|f| seen.insert((f.triple.head, f.triple.relation)))
        .map(|f| {
            let key = (f.triple.head, f.triple.relation);
            RankQuery {
                head: key.0,
                relation: key.1,
                relevance: labels.get(&key).cloned().unwrap_or_default(),
            }
        })
        .collect()
}
