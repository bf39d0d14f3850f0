use std::collections::{BTreeMap, HashMap};

use super::{Triple, WeightedTriple};

/// Lookup structures over a set of observed facts.
///
/// "Strong" facts are those with score strictly above `tau`. All adjacency
/// lists are sorted by entity id so that iteration order is deterministic.
#[derive(Debug, Clone)]
pub struct FactIndex {
    tau: f64,
    scores: HashMap<Triple, f64>,
    by_head_relation: HashMap<(usize, usize), Vec<(usize, f64)>>,
    strong_by_relation: BTreeMap<usize, Vec<(usize, usize, f64)>>,
    strong_out: HashMap<(usize, usize), Vec<(usize, f64)>>,
    strong_in: HashMap<(usize, usize), Vec<(usize, f64)>>,
}

impl FactIndex {
    /// Builds the index; a repeated key keeps the last score.
    pub fn new(facts: &[WeightedTriple], tau: f64) -> Self {
        let mut scores = HashMap::with_capacity(facts.len());
        for fact in facts {
            scores.insert(fact.triple, fact.score);
        }

        let mut by_head_relation: HashMap<(usize, usize), Vec<(usize, f64)>> = HashMap::new();
        let mut strong_by_relation: BTreeMap<usize, Vec<(usize, usize, f64)>> = BTreeMap::new();
        let mut strong_out: HashMap<(usize, usize), Vec<(usize, f64)>> = HashMap::new();
        let mut strong_in: HashMap<(usize, usize), Vec<(usize, f64)>> = HashMap::new();
        for (&t, &s) in &scores {
            by_head_relation
                .entry((t.head, t.relation))
                .or_default()
                .push((t.tail, s));
            if s > tau {
                strong_by_relation
                    .entry(t.relation)
                    .or_default()
                    .push((t.head, t.tail, s));
                strong_out
                    .entry((t.head, t.relation))
                    .or_default()
                    .push((t.tail, s));
                strong_in
                    .entry((t.relation, t.tail))
                    .or_default()
                    .push((t.head, s));
            }
        }
        let by_first = |a: &(usize, f64), b: &(usize, f64)| a.0.cmp(&b.0);
        by_head_relation
            .values_mut()
            .for_each(|v| v.sort_by(by_first));
        strong_out.values_mut().for_each(|v| v.sort_by(by_first));
        strong_in.values_mut().for_each(|v| v.sort_by(by_first));
        strong_by_relation
            .values_mut()
            .for_each(|v| v.sort_by_key(|a| (a.0, a.1)));

        Self {
            tau,
            scores,
            by_head_relation,
            strong_by_relation,
            strong_out,
            strong_in,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.scores.contains_key(triple)
    }

    pub fn score(&self, triple: &Triple) -> Option<f64> {
        self.scores.get(triple).copied()
    }

    /// Score of `triple` if it is observed and strong.
    pub fn strong_score(&self, triple: &Triple) -> Option<f64> {
        self.score(triple).filter(|&s| s > self.tau)
    }

    pub fn tails(&self, head: usize, relation: usize) -> &[(usize, f64)] {
        self.by_head_relation
            .get(&(head, relation))
            .map_or(&[], Vec::as_slice)
    }

    /// Strong facts `(head, relation, ?)` as `(tail, score)`.
    pub fn strong_tails(&self, head: usize, relation: usize) -> &[(usize, f64)] {
        self.strong_out
            .get(&(head, relation))
            .map_or(&[], Vec::as_slice)
    }

    /// Strong facts `(?, relation, tail)` as `(head, score)`.
    pub fn strong_heads(&self, relation: usize, tail: usize) -> &[(usize, f64)] {
        self.strong_in
            .get(&(relation, tail))
            .map_or(&[], Vec::as_slice)
    }

    /// Strong facts of one relation as `(head, tail, score)`, sorted.
    pub fn strong_by_relation(&self, relation: usize) -> &[(usize, usize, f64)] {
        self.strong_by_relation
            .get(&relation)
            .map_or(&[], Vec::as_slice)
    }

    /// Relations having at least one strong fact, ascending.
    pub fn strong_relations(&self) -> impl Iterator<Item = usize> + '_ {
        self.strong_by_relation.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = WeightedTriple> + '_ {
        self.scores.iter().map(|(&t, &s)| WeightedTriple::new(t, s))
    }
}
