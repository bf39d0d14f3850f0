use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{kind} id {id} out of range (size {size})")]
    IndexOutOfRange {
        kind: &'static str,
        id: usize,
        size: usize,
    },

    #[error("value {0} outside the unit interval")]
    Domain(f64),

    #[error("rule syntax error at line {line}, column {column}: {message}")]
    RuleSyntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("rule shape error at line {line}: {message}")]
    RuleShape { line: usize, message: String },

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("config: {0}")]
    Config(String),

    #[error("evaluation: {0}")]
    Evaluation(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
