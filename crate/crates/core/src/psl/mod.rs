//! Soft-logic rules: Lukasiewicz operators, rule syntax, grounding against
//! strong observed facts, and candidate rule mining.

mod ground;
mod logic;
mod mine;
mod rule;

pub use ground::{ground_for_head, GroundRule, Grounder};
pub use logic::{
    distance_to_satisfaction, luk_and, luk_neg, luk_or, prior_rule_distance, rule_value,
};
pub use mine::{format_report, mine_rules, MinedRuleReport, MiningConfig, RulePattern};
pub use rule::{bind_rules, parse_rules, Atom, BoundAtom, BoundRule, LogicalRule};

pub(crate) use logic::distance_unchecked;
