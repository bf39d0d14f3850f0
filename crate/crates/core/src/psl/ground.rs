use std::collections::HashMap;
use std::sync::Arc;

use dashmap::DashMap;

use super::logic::and_unchecked;
use super::rule::BoundRule;
use crate::data::{FactIndex, Triple, WeightedTriple};

/// One instantiation of a rule whose head is a given unseen triple.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundRule {
    pub rule_id: Arc<str>,
    pub weight: f64,
    pub body: [WeightedTriple; 2],
    pub head: Triple,
    /// Lukasiewicz conjunction of the two body scores.
    pub body_value: f64,
}

/// All groundings of `rule` with head `head` whose body facts are strong
/// observed facts in `index`. Each distinct shared entity gives one ground
/// rule; a body may not use the same fact twice.
pub fn ground_for_head(rule: &BoundRule, head: &Triple, index: &FactIndex) -> Vec<GroundRule> {
    if head.relation != rule.head_relation {
        return Vec::new();
    }
    let (x, y) = if rule.head_reversed {
        (head.tail, head.head)
    } else {
        (head.head, head.tail)
    };
    let [first, second] = rule.body;
    let candidates = if first.shared_is_subject {
        index.strong_heads(first.relation, x)
    } else {
        index.strong_tails(x, first.relation)
    };

    let atom = |shared: usize, endpoint: usize, relation: usize, shared_is_subject: bool| {
        if shared_is_subject {
            Triple::new(shared, relation, endpoint)
        } else {
            Triple::new(endpoint, relation, shared)
        }
    };

    let mut out = Vec::new();
    for &(m, s1) in candidates {
        let l1 = atom(m, x, first.relation, first.shared_is_subject);
        let l2 = atom(m, y, second.relation, second.shared_is_subject);
        if l1 == l2 {
            continue;
        }
        if let Some(s2) = index.strong_score(&l2) {
            out.push(GroundRule {
                rule_id: Arc::clone(&rule.id),
                weight: rule.weight,
                body: [WeightedTriple::new(l1, s1), WeightedTriple::new(l2, s2)],
                head: *head,
                body_value: and_unchecked(s1, s2),
            });
        }
    }
    out
}

/// Grounds rule sets against a fixed index, memoizing per `(rule, head, tail)`.
///
/// The cache is safe for concurrent readers and writers.
pub struct Grounder {
    rules: Vec<BoundRule>,
    index: Arc<FactIndex>,
    rules_by_relation: HashMap<usize, Vec<usize>>,
    cache: DashMap<(usize, usize, usize), Arc<[GroundRule]>>,
}

impl Grounder {
    pub fn new(rules: Vec<BoundRule>, index: Arc<FactIndex>) -> Self {
        let mut rules_by_relation: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, rule) in rules.iter().enumerate() {
            rules_by_relation
                .entry(rule.head_relation)
                .or_default()
                .push(i);
        }
        Self {
            rules,
            index,
            rules_by_relation,
            cache: DashMap::new(),
        }
    }

    pub fn rules(&self) -> &[BoundRule] {
        &self.rules
    }

    pub fn index(&self) -> &FactIndex {
        &self.index
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.len()
    }

    /// Ground rules of every rule whose head is `head`, in rule order.
    pub fn ground(&self, head: &Triple) -> Vec<GroundRule> {
        let mut out = Vec::new();
        self.for_each(head, |g| out.push(g.clone()));
        out
    }

    pub(crate) fn for_each(&self, head: &Triple, mut visit: impl FnMut(&GroundRule)) {
        let Some(rule_ids) = self.rules_by_relation.get(&head.relation) else {
            return;
        };
        for &i in rule_ids {
            let key = (i, head.head, head.tail);
            let grounded = match self.cache.get(&key) {
                Some(hit) => Arc::clone(hit.value()),
                None => {
                    let fresh: Arc<[GroundRule]> =
                        ground_for_head(&self.rules[i], head, &self.index).into();
                    Arc::clone(self.cache.entry(key).or_insert(fresh).value())
                }
            };
            grounded.iter().for_each(&mut visit);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Vocabulary;
    use crate::psl::rule::{bind_rules, parse_rules};
    use proptest::prelude::*;

    fn synonym_world() -> (Vocabulary, Vec<BoundRule>) {
        let vocab = Vocabulary::from_names(
            ["college", "university", "institute", "school", "academy"],
            ["synonym", "other"],
        )
        .unwrap();
        let rules =
            parse_rules("(A, synonym, B) & (B, synonym, C) => (A, synonym, C) : 1.0").unwrap();
        let bound = bind_rules(&rules, &vocab).unwrap();
        (vocab, bound)
    }

    fn fact(h: usize, r: usize, t: usize, s: f64) -> WeightedTriple {
        WeightedTriple::new(Triple::new(h, r, t), s)
    }

    #[test]
    fn synonym_example_gives_body_value_085() {
        let (_, rules) = synonym_world();
        let index = FactIndex::new(&[fact(0, 0, 1, 0.99), fact(1, 0, 2, 0.86)], 0.85);
        let grounded = ground_for_head(&rules[0], &Triple::new(0, 0, 2), &index);
        assert_eq!(grounded.len(), 1);
        assert_eq!(grounded[0].body_value, 0.85);
        assert_eq!(grounded[0].body[0].triple, Triple::new(0, 0, 1));
        assert_eq!(grounded[0].body[1].triple, Triple::new(1, 0, 2));
        assert_eq!(&*grounded[0].rule_id, "rule-1");
    }

    #[test]
    fn other_relation_grounds_nothing() {
        let (_, rules) = synonym_world();
        let index = FactIndex::new(&[fact(0, 0, 1, 0.99), fact(1, 0, 2, 0.86)], 0.85);
        assert!(ground_for_head(&rules[0], &Triple::new(0, 1, 2), &index).is_empty());
    }

    #[test]
    fn two_middles_give_two_ground_rules() {
        let (_, rules) = synonym_world();
        let index = FactIndex::new(
            &[
                fact(0, 0, 1, 0.99),
                fact(1, 0, 2, 0.86),
                fact(0, 0, 3, 0.9),
                fact(3, 0, 2, 0.95),
            ],
            0.85,
        );
        let grounded = ground_for_head(&rules[0], &Triple::new(0, 0, 2), &index);
        assert_eq!(grounded.len(), 2);
        let mut values: Vec<f64> = grounded.iter().map(|g| g.body_value).collect();
        values.sort_by(f64::total_cmp);
        assert!((values[0] - 0.85).abs() < 1e-15);
        assert!((values[1] - 0.85).abs() < 1e-15);
    }

    #[test]
    fn weak_body_facts_are_excluded() {
        let (_, rules) = synonym_world();
        let index = FactIndex::new(&[fact(0, 0, 1, 0.99), fact(1, 0, 2, 0.85)], 0.85);
        assert!(ground_for_head(&rules[0], &Triple::new(0, 0, 2), &index).is_empty());
    }

    #[test]
    fn shared_subject_grounding() {
        let vocab = Vocabulary::from_names(
            ["ann", "team", "sport"],
            ["plays_for", "plays", "team_sport"],
        )
        .unwrap();
        let rules = parse_rules("(A, plays_for, B) & (A, plays, C) => (B, team_sport, C)").unwrap();
        let bound = bind_rules(&rules, &vocab).unwrap();
        let index = FactIndex::new(&[fact(0, 0, 1, 0.9), fact(0, 1, 2, 0.95)], 0.85);
        let grounded = ground_for_head(&bound[0], &Triple::new(1, 2, 2), &index);
        assert_eq!(grounded.len(), 1);
        assert!((grounded[0].body_value - 0.85).abs() < 1e-15);
    }

    #[test]
    fn grounder_memoizes() {
        let (_, rules) = synonym_world();
        let index = Arc::new(FactIndex::new(
            &[fact(0, 0, 1, 0.99), fact(1, 0, 2, 0.86)],
            0.85,
        ));
        let grounder = Grounder::new(rules, index);
        let head = Triple::new(0, 0, 2);
        let first = grounder.ground(&head);
        assert_eq!(grounder.cached_entries(), 1);
        assert_eq!(grounder.ground(&head), first);
        assert_eq!(grounder.cached_entries(), 1);
        assert!(grounder.ground(&Triple::new(0, 1, 2)).is_empty());
        assert_eq!(grounder.cached_entries(), 1);
    }

    proptest! {
        // Every ground rule's body must survive the strong filter, and the
        // grounding must agree with a brute-force scan over middle entities.
        #[test]
        fn grounding_matches_brute_force(
            facts in proptest::collection::vec((0usize..6, 0usize..6, 0.5f64..1.0), 0..30),
            tau in 0.6f64..0.95,
            h in 0usize..6,
            t in 0usize..6,
        ) {
            let (_, rules) = synonym_world();
            let facts: Vec<WeightedTriple> = facts.into_iter().map(|(a, b, s)| fact(a, 0, b, s)).collect();
            let index = FactIndex::new(&facts, tau);
            let grounded = ground_for_head(&rules[0], &Triple::new(h, 0, t), &index);
            for g in &grounded {
                prop_assert!(g.body.iter().all(|b| b.score > tau));
                prop_assert!(g.body.iter().all(|b| index.contains(&b.triple)));
            }
            let mut expected = 0;
            for m in 0..6 {
                let l1 = Triple::new(h, 0, m);
                let l2 = Triple::new(m, 0, t);
                if l1 != l2 && index.strong_score(&l1).is_some() && index.strong_score(&l2).is_some() {
                    expected += 1;
                }
            }
            prop_assert_eq!(grounded.len(), expected);
        }
    }
}
