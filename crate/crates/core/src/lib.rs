//! Embeddings for uncertain knowledge graphs.
//!
//! Facts carry a confidence in `[0, 1]`. A bilinear model scores triples,
//! a logistic or bounded-rectifier map turns scores into confidences, and
//! Lukasiewicz soft-logic rules supply targets for unseen triples during
//! training. The [`eval`] module measures confidence prediction, tail
//! ranking and strong-fact classification.

pub mod data;
pub mod error;
pub mod eval;
pub mod model;
pub mod psl;
pub mod synth;
pub mod train;

pub use data::{DatasetSplit, FactIndex, Triple, Vocabulary, WeightedTriple};
pub use error::{Error, Result};
pub use model::{ModelParams, Variant};
