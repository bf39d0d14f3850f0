//! Candidate rule discovery over length-2 paths of strong facts.

use std::collections::BTreeMap;

use serde::Serialize;

use super::rule::{Atom, LogicalRule};
use crate::data::{FactIndex, Triple, Vocabulary};

/// The two body shapes that are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RulePattern {
    /// `(A, r1, B) & (B, r2, C) => (A, r3, C)`
    Chain,
    /// `(A, r1, B) & (A, r2, C) => (B, r3, C)`
    SharedHead,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningConfig {
    pub min_hit_ratio: f64,
    pub min_support: usize,
    /// Paths collected per `(pattern, r1, r2)` before enumeration stops.
    pub max_paths: usize,
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self {
            min_hit_ratio: 0.0,
            min_support: 1,
            max_paths: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinedRuleReport {
    pub rule: LogicalRule,
    pub pattern: RulePattern,
    pub hit_ratio: f64,
    /// Number of groundable bodies (paths).
    pub support: usize,
    pub hits: usize,
    /// Set when `max_paths` cut the enumeration short; the ratio is then an estimate.
    pub truncated: bool,
}

struct Paths {
    endpoints: Vec<(usize, usize)>,
    truncated: bool,
}

/// Enumerates every relation pair with at least one strong length-2 path
/// and scores each possible head relation by the fraction of paths whose
/// implied fact is observed (at any confidence).
///
/// Reports meeting both thresholds are returned sorted by hit ratio
/// (descending), then support (descending), then pattern and relation ids.
pub fn mine_rules(
    index: &FactIndex,
    vocab: &Vocabulary,
    config: &MiningConfig,
) -> Vec<MinedRuleReport> {
    let mut groups: BTreeMap<(RulePattern, usize, usize), Paths> = BTreeMap::new();
    let relations: Vec<usize> = index.strong_relations().collect();
    let mut push = |key, endpoints: (usize, usize)| {
        let paths = groups.entry(key).or_insert_with(|| Paths {
            endpoints: Vec::new(),
            truncated: false,
        });
        if paths.endpoints.len() < config.max_paths {
            paths.endpoints.push(endpoints);
        } else {
            paths.truncated = true;
        }
    };

    for &r1 in &relations {
        for &(a, b, _) in index.strong_by_relation(r1) {
            let first = Triple::new(a, r1, b);
            for &r2 in &relations {
                // chain: (a, r1, b) & (b, r2, c) => (a, ?, c)
                for &(c, _) in index.strong_tails(b, r2) {
                    if Triple::new(b, r2, c) != first {
                        push((RulePattern::Chain, r1, r2), (a, c));
                    }
                }
                // shared head: (a, r1, b) & (a, r2, c) => (b, ?, c)
                for &(c, _) in index.strong_tails(a, r2) {
                    if Triple::new(a, r2, c) != first {
                        push((RulePattern::SharedHead, r1, r2), (b, c));
                    }
                }
            }
        }
    }

    let num_relations = vocab.num_relations();
    let mut reports = Vec::new();
    for ((pattern, r1, r2), paths) in groups {
        let support = paths.endpoints.len();
        if support == 0 || support < config.min_support {
            continue;
        }
        for r3 in 0..num_relations {
            let hits = paths
                .endpoints
                .iter()
                .filter(|&&(x, y)| index.contains(&Triple::new(x, r3, y)))
                .count();
            let hit_ratio = hits as f64 / support as f64;
            if hit_ratio < config.min_hit_ratio {
                continue;
            }
            reports.push(MinedRuleReport {
                rule: candidate(pattern, [r1, r2, r3], vocab),
                pattern,
                hit_ratio,
                support,
                hits,
                truncated: paths.truncated,
            });
        }
    }

    reports.sort_by(|a, b| {
        b.hit_ratio
            .total_cmp(&a.hit_ratio)
            .then(b.support.cmp(&a.support))
            .then(a.pattern.cmp(&b.pattern))
            .then_with(|| relation_key(&a.rule).cmp(&relation_key(&b.rule)))
    });
    for (i, report) in reports.iter_mut().enumerate() {
        report.rule.id = format!("mined-{}", i + 1);
    }
    reports
}

fn relation_key(rule: &LogicalRule) -> [&str; 3] {
    [
        rule.body[0].relation.as_str(),
        rule.body[1].relation.as_str(),
        rule.head.relation.as_str(),
    ]
}

fn candidate(pattern: RulePattern, [r1, r2, r3]: [usize; 3], vocab: &Vocabulary) -> LogicalRule {
    let name = |r| vocab.relation_name(r).unwrap_or("?");
    let (body, head) = match pattern {
        RulePattern::Chain => (
            [Atom::new("A", name(r1), "B"), Atom::new("B", name(r2), "C")],
            Atom::new("A", name(r3), "C"),
        ),
        RulePattern::SharedHead => (
            [Atom::new("A", name(r1), "B"), Atom::new("A", name(r2), "C")],
            Atom::new("B", name(r3), "C"),
        ),
    };
    LogicalRule {
        id: String::new(),
        body,
        head,
        weight: 1.0,
    }
}

/// Tab-separated `rule`, `support`, `hit_ratio` table with a header row.
/// Truncated estimates are marked with a trailing `~` on the ratio.
pub fn format_report(reports: &[MinedRuleReport]) -> String {
    let mut out = String::from("rule\tsupport\thit_ratio\n");
    for r in reports {
        let rule = format!("{} & {} => {}", r.rule.body[0], r.rule.body[1], r.rule.head);
        let mark = if r.truncated { "~" } else { "" };
        out.push_str(&format!(
            "{rule}\t{}\t{:.6}{mark}\n",
            r.support, r.hit_ratio
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::WeightedTriple;
    use proptest::prelude::*;

    fn fact(h: usize, r: usize, t: usize, s: f64) -> WeightedTriple {
        WeightedTriple::new(Triple::new(h, r, t), s)
    }

    fn names(n: usize, prefix: &str) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn empty_graph_mines_nothing() {
        let vocab = Vocabulary::new();
        let index = FactIndex::new(&[], 0.85);
        assert!(mine_rules(&index, &vocab, &MiningConfig::default()).is_empty());
    }

    #[test]
    fn transitive_order_gives_perfect_chain_rule() {
        // strict order on 6 entities: i -> j for all i < j
        let vocab = Vocabulary::from_names(names(6, "e"), ["less"]).unwrap();
        let mut facts = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                facts.push(fact(i, 0, j, 0.95));
            }
        }
        let index = FactIndex::new(&facts, 0.85);
        let reports = mine_rules(&index, &vocab, &MiningConfig::default());
        let top = &reports[0];
        assert_eq!(top.pattern, RulePattern::Chain);
        assert_eq!(top.hit_ratio, 1.0);
        assert_eq!(top.support, 20); // sum over middles m of m * (5 - m)
        assert_eq!(
            top.rule.to_string(),
            "(A, less, B) & (B, less, C) => (A, less, C) : 1"
        );
    }

    #[test]
    fn hub_fixture_hit_ratio_is_037() {
        // 10 strong edges into a hub and 10 out of it give 100 chain paths;
        // 37 of the implied (a_i, implied, c_j) facts are observed (weakly).
        let vocab = Vocabulary::from_names(names(21, "e"), ["in", "out", "implied"]).unwrap();
        let hub = 20;
        let mut facts = Vec::new();
        for i in 0..10 {
            facts.push(fact(i, 0, hub, 0.9));
            facts.push(fact(hub, 1, 10 + i, 0.9));
        }
        let mut k = 0;
        'outer: for i in 0..10 {
            for j in 0..10 {
                if k == 37 {
                    break 'outer;
                }
                facts.push(fact(i, 2, 10 + j, 0.3));
                k += 1;
            }
        }
        let index = FactIndex::new(&facts, 0.85);
        let config = MiningConfig {
            min_hit_ratio: 0.01,
            ..MiningConfig::default()
        };
        let reports = mine_rules(&index, &vocab, &config);
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].support, 100);
        assert_eq!(reports[0].hits, 37);
        assert_eq!(reports[0].hit_ratio, 0.37);
    }

    #[test]
    fn thresholds_and_truncation() {
        let vocab = Vocabulary::from_names(names(6, "e"), ["less"]).unwrap();
        let mut facts = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                facts.push(fact(i, 0, j, 0.95));
            }
        }
        let index = FactIndex::new(&facts, 0.85);
        let strict = MiningConfig {
            min_support: 1000,
            ..MiningConfig::default()
        };
        assert!(mine_rules(&index, &vocab, &strict).is_empty());
        let capped = MiningConfig {
            max_paths: 5,
            ..MiningConfig::default()
        };
        let reports = mine_rules(&index, &vocab, &capped);
        assert!(reports.iter().all(|r| r.support <= 5 && r.truncated));
        assert!(format_report(&reports).contains('~'));
    }

    // Independent count: loop over every entity triple and relation triple.
    fn brute_force(
        index: &FactIndex,
        n: usize,
        nr: usize,
    ) -> BTreeMap<(RulePattern, usize, usize, usize), (usize, usize)> {
        let strong = |h, r, t| index.strong_score(&Triple::new(h, r, t)).is_some();
        let mut out = BTreeMap::new();
        for r1 in 0..nr {
            for r2 in 0..nr {
                let mut chain = Vec::new();
                let mut shared = Vec::new();
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            if strong(a, r1, b) && strong(b, r2, c) && (a, r1, b) != (b, r2, c) {
                                chain.push((a, c));
                            }
                            if strong(a, r1, b) && strong(a, r2, c) && (r1, b) != (r2, c) {
                                shared.push((b, c));
                            }
                        }
                    }
                }
                for (pattern, paths) in [
                    (RulePattern::Chain, chain),
                    (RulePattern::SharedHead, shared),
                ] {
                    if paths.is_empty() {
                        continue;
                    }
                    for r3 in 0..nr {
                        let hits = paths
                            .iter()
                            .filter(|&&(x, y)| index.contains(&Triple::new(x, r3, y)))
                            .count();
                        out.insert((pattern, r1, r2, r3), (hits, paths.len()));
                    }
                }
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn hit_ratios_match_brute_force(
            facts in proptest::collection::vec((0usize..12, 0usize..3, 0usize..12, 0.0f64..1.0), 0..80)
        ) {
            let vocab = Vocabulary::from_names(names(12, "e"), ["r0", "r1", "r2"]).unwrap();
            let facts: Vec<WeightedTriple> = facts.into_iter().map(|(h, r, t, s)| fact(h, r, t, s)).collect();
            let index = FactIndex::new(&facts, 0.5);
            let reports = mine_rules(&index, &vocab, &MiningConfig::default());
            let expected = brute_force(&index, 12, 3);
            prop_assert_eq!(reports.len(), expected.len());
            for r in &reports {
                let rel = |name: &str| vocab.relation_id(name).unwrap();
                let key = (r.pattern, rel(&r.rule.body[0].relation), rel(&r.rule.body[1].relation), rel(&r.rule.head.relation));
                let (hits, support) = expected[&key];
                prop_assert_eq!((r.hits, r.support), (hits, support));
                prop_assert_eq!(r.hit_ratio, hits as f64 / support as f64);
            }
            for pair in reports.windows(2) {
                prop_assert!(pair[0].hit_ratio >= pair[1].hit_ratio);
            }
        }
    }
}
