//! Length-2 rule templates and their text syntax.
//!
//! One rule per line:
//!
//! ```text
//! (A, synonym, B) & (B, synonym, C) => (A, synonym, C) : 1.0
//! ```
//!
//! Variables are identifiers starting with an uppercase ASCII letter. The
//! trailing `: weight` is optional and defaults to 1. Blank lines and lines
//! starting with `#` are ignored.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::data::Vocabulary;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

impl Atom {
    pub fn new(subject: &str, relation: &str, object: &str) -> Self {
        Self {
            subject: subject.into(),
            relation: relation.into(),
            object: object.into(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.subject, self.relation, self.object)
    }
}

/// `body[0] & body[1] => head`, where the body atoms share exactly one
/// variable and the head joins the two remaining ones.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalRule {
    pub id: String,
    pub body: [Atom; 2],
    pub head: Atom,
    pub weight: f64,
}

impl fmt::Display for LogicalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} & {} => {} : {}",
            self.body[0], self.body[1], self.head, self.weight
        )
    }
}

/// Orientation of one body atom relative to the shared variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundAtom {
    pub relation: usize,
    /// `true` when the shared variable is the atom's subject.
    pub shared_is_subject: bool,
}

/// A rule resolved against a vocabulary.
///
/// Call the endpoint in `body[0]` X and the one in `body[1]` Y; the head is
/// `(X, r, Y)`, or `(Y, r, X)` when `head_reversed` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRule {
    pub id: Arc<str>,
    pub weight: f64,
    pub body: [BoundAtom; 2],
    pub head_relation: usize,
    pub head_reversed: bool,
}

impl LogicalRule {
    /// Checks the variable pattern; `line` is only used in error messages.
    pub fn validate(&self, line: usize) -> Result<()> {
        let shape = |message: String| Err(Error::RuleShape { line, message });
        if !(self.weight > 0.0 && self.weight.is_finite()) {
            return shape(format!("weight must be positive, got {}", self.weight));
        }
        for atom in self.body.iter().chain([&self.head]) {
            if atom.subject == atom.object {
                return shape(format!("atom {atom} repeats a variable"));
            }
        }
        let vars = |a: &Atom| BTreeSet::from([a.subject.clone(), a.object.clone()]);
        let (first, second) = (vars(&self.body[0]), vars(&self.body[1]));
        let shared: Vec<_> = first.intersection(&second).collect();
        if shared.len() != 1 {
            return shape(format!(
                "body atoms must share exactly one variable, found {}",
                shared.len()
            ));
        }
        let endpoints: BTreeSet<String> = first.symmetric_difference(&second).cloned().collect();
        if vars(&self.head) != endpoints {
            return shape(format!(
                "head {} must connect the body endpoints {:?}",
                self.head, endpoints
            ));
        }
        Ok(())
    }

    pub fn bind(&self, vocab: &Vocabulary) -> Result<BoundRule> {
        self.validate(0)?;
        let relation = |name: &str| {
            vocab
                .relation_id(name)
                .ok_or_else(|| Error::UnknownRelation(name.to_owned()))
        };
        let shared = if self.body[0].subject == self.body[1].subject
            || self.body[0].subject == self.body[1].object
        {
            &self.body[0].subject
        } else {
            &self.body[0].object
        };
        let endpoint_x = if &self.body[0].subject == shared {
            &self.body[0].object
        } else {
            &self.body[0].subject
        };
        let mut body = [BoundAtom {
            relation: 0,
            shared_is_subject: false,
        }; 2];
        for (slot, atom) in body.iter_mut().zip(&self.body) {
            *slot = BoundAtom {
                relation: relation(&atom.relation)?,
                shared_is_subject: &atom.subject == shared,
            };
        }
        Ok(BoundRule {
            id: Arc::from(self.id.as_str()),
            weight: self.weight,
            body,
            head_relation: relation(&self.head.relation)?,
            head_reversed: &self.head.subject != endpoint_x,
        })
    }
}

pub fn parse_rules(text: &str) -> Result<Vec<LogicalRule>> {
    let mut rules = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut rule = Parser::new(line, i + 1).rule()?;
        rule.id = format!("rule-{}", rules.len() + 1);
        rule.validate(i + 1)?;
        rules.push(rule);
    }
    Ok(rules)
}

pub fn bind_rules(rules: &[LogicalRule], vocab: &Vocabulary) -> Result<Vec<BoundRule>> {
    rules.iter().map(|r| r.bind(vocab)).collect()
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Self { src, pos: 0, line }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::RuleSyntax {
            line: self.line,
            column: self.src[..self.pos].chars().count() + 1,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.error(format!("expected `{token}`"))
        }
    }

    fn variable(&mut self) -> Result<String> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        let name = &rest[..len];
        if !name.starts_with(|c: char| c.is_ascii_uppercase()) {
            return self.error("expected a capitalized variable");
        }
        self.pos += len;
        Ok(name.to_owned())
    }

    fn relation(&mut self) -> Result<String> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.find([',', '(', ')']).unwrap_or(rest.len());
        let name = rest[..len].trim();
        if name.is_empty() {
            return self.error("expected a relation name");
        }
        self.pos += len;
        Ok(name.to_owned())
    }

    fn atom(&mut self) -> Result<Atom> {
        self.expect("(")?;
        let subject = self.variable()?;
        self.expect(",")?;
        let relation = self.relation()?;
        self.expect(",")?;
        let object = self.variable()?;
        self.expect(")")?;
        Ok(Atom {
            subject,
            relation,
            object,
        })
    }

    fn rule(&mut self) -> Result<LogicalRule> {
        let first = self.atom()?;
        if self.eat("=>") {
            let _ = self.atom()?;
            return Err(Error::RuleShape {
                line: self.line,
                message: "rule body must have two atoms".into(),
            });
        }
        self.expect("&")?;
        let second = self.atom()?;
        if self.eat("&") {
            return Err(Error::RuleShape {
                line: self.line,
                message: "rule body must have exactly two atoms".into(),
            });
        }
        self.expect("=>")?;
        let head = self.atom()?;
        let weight = if self.eat(":") {
            self.skip_ws();
            let rest = self.rest();
            let len = rest.find(char::is_whitespace).unwrap_or(rest.len());
            let weight: f64 = match rest[..len].parse() {
                Ok(w) => w,
                Err(_) => return self.error("expected a numeric weight"),
            };
            self.pos += len;
            weight
        } else {
            1.0
        };
        self.skip_ws();
        if !self.rest().is_empty() {
            return self.error("unexpected trailing input");
        }
        Ok(LogicalRule {
            id: String::new(),
            body: [first, second],
            head,
            weight,
        })
    }
}
