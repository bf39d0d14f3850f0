//! The joint objective and its analytic gradient.
//!
//! ```text
//! J = sum_{l observed} (f(l) - s_l)^2
//!   + sum_{l unseen} sum_{g in G_l} (w_g d_g)^2
//!   + lambda (|E|_F^2 + |R|_F^2)
//! ```
//!
//! `G_l` always contains the negation prior (distance `f(l)`, weight 1) and,
//! unless PSL is ablated, every ground rule whose head is `l` (distance
//! `max(0, body - f(l))`). Body values are constants.

use serde::{Deserialize, Serialize};

use super::config::Ablation;
use crate::data::{Triple, WeightedTriple};
use crate::model::ModelParams;
use crate::psl::{distance_unchecked, Grounder};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub observed: f64,
    pub unseen: f64,
    pub regularization: f64,
}

impl LossBreakdown {
    pub fn total(&self) -> f64 {
        self.observed + self.unseen + self.regularization
    }
}

impl std::ops::AddAssign for LossBreakdown {
    fn add_assign(&mut self, rhs: Self) {
        self.observed += rhs.observed;
        self.unseen += rhs.unseen;
        self.regularization += rhs.regularization;
    }
}

/// Gradient with the same layout as [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub entities: Vec<f64>,
    pub relations: Vec<f64>,
    pub w: f64,
    pub b: f64,
}

impl Gradients {
    pub fn zeros_like(params: &ModelParams) -> Self {
        Self {
            entities: vec![0.0; params.entities.len()],
            relations: vec![0.0; params.relations.len()],
            w: 0.0,
            b: 0.0,
        }
    }

    pub fn entity(&self, id: usize, dim: usize) -> &[f64] {
        &self.entities[id * dim..(id + 1) * dim]
    }

    pub(crate) fn slices(&self) -> [&[f64]; 4] {
        [
            &self.entities,
            &self.relations,
            std::slice::from_ref(&self.w),
            std::slice::from_ref(&self.b),
        ]
    }
}

/// What the unseen-fact term is built from.
#[derive(Clone, Copy)]
pub enum UnseenRules<'a> {
    /// Negation prior only.
    PriorOnly,
    /// Negation prior plus the grounder's rules.
    Grounded(&'a Grounder),
}

impl<'a> UnseenRules<'a> {
    pub fn for_ablation(ablation: Ablation, grounder: Option<&'a Grounder>) -> Option<Self> {
        match (ablation, grounder) {
            (Ablation::NoNegatives, _) => None,
            (Ablation::NoPsl, _) | (Ablation::Full, None) => Some(UnseenRules::PriorOnly),
            (Ablation::Full, Some(g)) => Some(UnseenRules::Grounded(g)),
        }
    }
}

pub fn loss_observed(params: &ModelParams, batch: &[WeightedTriple]) -> f64 {
    batch
        .iter()
        .map(|fact| (params.confidence_unchecked(&fact.triple) - fact.score).powi(2))
        .sum()
}

/// Loss of one unseen triple with confidence `f` and its derivative in `f`.
fn unseen_term(f: f64, head: &Triple, rules: UnseenRules<'_>) -> (f64, f64) {
    let mut loss = f * f;
    let mut d_f = 2.0 * f;
    if let UnseenRules::Grounded(grounder) = rules {
        grounder.for_each(head, |g| {
            let d = distance_unchecked(g.body_value, f);
            let wd = g.weight * d;
            loss += wd * wd;
            if d > 0.0 {
                d_f -= 2.0 * g.weight * wd;
            }
        });
    }
    (loss, d_f)
}

pub fn loss_unseen(params: &ModelParams, negatives: &[Triple], rules: UnseenRules<'_>) -> f64 {
    negatives
        .iter()
        .map(|l| unseen_term(params.confidence_unchecked(l), l, rules).0)
        .sum()
}

pub fn regularization(params: &ModelParams, l2_lambda: f64) -> f64 {
    let sq: f64 = params
        .entities
        .iter()
        .chain(&params.relations)
        .map(|v| v * v)
        .sum();
    l2_lambda * sq
}

/// `rules = None` drops the unseen term entirely.
pub fn joint_loss(
    params: &ModelParams,
    batch: &[WeightedTriple],
    negatives: &[Triple],
    rules: Option<UnseenRules<'_>>,
    l2_lambda: f64,
) -> LossBreakdown {
    LossBreakdown {
        observed: loss_observed(params, batch),
        unseen: rules.map_or(0.0, |r| loss_unseen(params, negatives, r)),
        regularization: regularization(params, l2_lambda),
    }
}

/// Loss and exact (sub)gradient of [`joint_loss`].
pub fn gradients(
    params: &ModelParams,
    batch: &[WeightedTriple],
    negatives: &[Triple],
    rules: Option<UnseenRules<'_>>,
    l2_lambda: f64,
) -> (LossBreakdown, Gradients) {
    let mut grads = Gradients::zeros_like(params);
    let mut loss = LossBreakdown::default();

    for fact in batch {
        let g = params.plausibility_unchecked(&fact.triple);
        let m = params.variant().map_gradient(g, params.w, params.b);
        let residual = m.value - fact.score;
        loss.observed += residual * residual;
        accumulate(params, &mut grads, &fact.triple, 2.0 * residual, g);
    }

    if let Some(rules) = rules {
        for l in negatives {
            let g = params.plausibility_unchecked(l);
            let f = params.map(g);
            let (term, d_f) = unseen_term(f, l, rules);
            loss.unseen += term;
            accumulate(params, &mut grads, l, d_f, g);
        }
    }

    if l2_lambda > 0.0 {
        loss.regularization = regularization(params, l2_lambda);
        let scale = 2.0 * l2_lambda;
        for (gr, p) in grads.entities.iter_mut().zip(&params.entities) {
            *gr += scale * p;
        }
        for (gr, p) in grads.relations.iter_mut().zip(&params.relations) {
            *gr += scale * p;
        }
    }

    (loss, grads)
}

/// Back-propagates `d_f` (dLoss/dConfidence) through the map and the bilinear score.
fn accumulate(params: &ModelParams, grads: &mut Gradients, triple: &Triple, d_f: f64, g: f64) {
    if d_f == 0.0 {
        return;
    }
    let m = params.variant().map_gradient(g, params.w, params.b);
    grads.w += d_f * m.d_w;
    grads.b += d_f * m.d_b;
    let d_g = d_f * m.d_x;
    if d_g == 0.0 {
        return;
    }
    let k = params.dim();
    let (h, r, t) = (triple.head, triple.relation, triple.tail);
    for i in 0..k {
        let hv = params.entities[h * k + i];
        let rv = params.relations[r * k + i];
        let tv = params.entities[t * k + i];
        grads.entities[h * k + i] += d_g * rv * tv;
        grads.entities[t * k + i] += d_g * rv * hv;
        grads.relations[r * k + i] += d_g * hv * tv;
    }
}
