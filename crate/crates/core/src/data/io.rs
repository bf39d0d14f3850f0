use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use indexmap::IndexMap;
use log::warn;

use super::{RawTriple, Triple, Vocabulary, WeightedTriple};
use crate::error::{Error, Result};

/// Zero-based positions of the four required columns in a tab-separated line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnSpec {
    pub head: usize,
    pub relation: usize,
    pub tail: usize,
    pub score: usize,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            head: 0,
            relation: 1,
            tail: 2,
            score: 3,
        }
    }
}

impl ColumnSpec {
    fn width(&self) -> usize {
        1 + self.head.max(self.relation).max(self.tail).max(self.score)
    }
}

/// Reads `head<TAB>relation<TAB>tail<TAB>score` lines, interning names into `vocab`.
///
/// Blank lines and lines starting with `#` are skipped. A repeated
/// `(h, r, t)` key keeps its first position but takes the last score seen.
pub fn parse_triples<R: BufRead>(
    source: R,
    schema: &ColumnSpec,
    vocab: &mut Vocabulary,
) -> Result<Vec<RawTriple>> {
    let mut facts: IndexMap<Triple, f64> = IndexMap::new();
    let width = schema.width().max(4);

    for (lineno, line) in source.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < width {
            return Err(Error::Parse {
                line: lineno,
                message: format!(
                    "expected at least {width} tab-separated fields, found {}",
                    fields.len()
                ),
            });
        }
        let (head, relation, tail) = (
            fields[schema.head].trim(),
            fields[schema.relation].trim(),
            fields[schema.tail].trim(),
        );
        if head.is_empty() || relation.is_empty() || tail.is_empty() {
            return Err(Error::Parse {
                line: lineno,
                message: "empty head, relation or tail".into(),
            });
        }
        let raw = fields[schema.score].trim();
        let score: f64 = raw.parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("non-numeric score `{raw}`"),
        })?;
        if !score.is_finite() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("non-finite score `{raw}`"),
            });
        }

        let triple = Triple::new(
            vocab.intern_entity(head),
            vocab.intern_relation(relation),
            vocab.intern_entity(tail),
        );
        if let Some(previous) = facts.insert(triple, score) {
            warn!("line {lineno}: duplicate ({head}, {relation}, {tail}); replacing score {previous} with {score}");
        }
    }

    Ok(facts
        .into_iter()
        .map(|(triple, raw_score)| RawTriple { triple, raw_score })
        .collect())
}

pub fn read_triple_file(path: &Path, vocab: &mut Vocabulary) -> Result<Vec<RawTriple>> {
    let file = File::open(path)?;
    parse_triples(BufReader::new(file), &ColumnSpec::default(), vocab)
}

/// Writes triples in the four-column format. Scores use the shortest
/// representation that parses back to the same `f64`.
pub fn write_triples<W: Write>(
    mut sink: W,
    triples: &[WeightedTriple],
    vocab: &Vocabulary,
) -> Result<()> {
    for fact in triples {
        let t = fact.triple;
        let name = |id: usize, kind: &'static str, found: Option<&str>| {
            found.map(str::to_owned).ok_or(Error::IndexOutOfRange {
                kind,
                id,
                size: if kind == "relation" {
                    vocab.num_relations()
                } else {
                    vocab.num_entities()
                },
            })
        };
        let head = name(t.head, "entity", vocab.entity_name(t.head))?;
        let relation = name(t.relation, "relation", vocab.relation_name(t.relation))?;
        let tail = name(t.tail, "entity", vocab.entity_name(t.tail))?;
        writeln!(sink, "{head}\t{relation}\t{tail}\t{}", fact.score)?;
    }
    Ok(())
}
