//! Bilinear plausibility and its mapping to confidence.

mod file;

pub use file::{read_model, write_model, write_text_export, ModelHeader, MODEL_FORMAT_VERSION};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Triple;
use crate::error::{Error, Result};

/// Which function turns plausibility into confidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Logistic,
    Rectifier,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Logistic => "logistic",
            Variant::Rectifier => "rectifier",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic" | "logi" => Ok(Variant::Logistic),
            "rectifier" | "rect" => Ok(Variant::Rectifier),
            other => Err(Error::Config(format!("unknown variant `{other}`"))),
        }
    }
}

/// `1 / (1 + exp(-(w x + b)))`, evaluated without overflow.
pub fn map_logistic(x: f64, w: f64, b: f64) -> f64 {
    sigmoid(w * x + b)
}

/// `min(max(w x + b, 0), 1)`.
pub fn map_rectifier(x: f64, w: f64, b: f64) -> f64 {
    (w * x + b).clamp(0.0, 1.0)
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Value of the mapping and its partial derivatives in `x`, `w` and `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapGradient {
    pub value: f64,
    pub d_x: f64,
    pub d_w: f64,
    pub d_b: f64,
}

impl Variant {
    pub fn map(self, x: f64, w: f64, b: f64) -> f64 {
        match self {
            Variant::Logistic => map_logistic(x, w, b),
            Variant::Rectifier => map_rectifier(x, w, b),
        }
    }

    /// The rectifier's subgradient is zero at and beyond both kinks.
    pub fn map_gradient(self, x: f64, w: f64, b: f64) -> MapGradient {
        match self {
            Variant::Logistic => {
                let value = map_logistic(x, w, b);
                let slope = value * (1.0 - value);
                MapGradient {
                    value,
                    d_x: slope * w,
                    d_w: slope * x,
                    d_b: slope,
                }
            }
            Variant::Rectifier => {
                let z = w * x + b;
                if z > 0.0 && z < 1.0 {
                    MapGradient {
                        value: z,
                        d_x: w,
                        d_w: x,
                        d_b: 1.0,
                    }
                } else {
                    MapGradient {
                        value: z.clamp(0.0, 1.0),
                        d_x: 0.0,
                        d_w: 0.0,
                        d_b: 0.0,
                    }
                }
            }
        }
    }
}

/// Entity and relation embeddings plus the global mapping weight and bias.
///
/// Both matrices are stored row-major, one row of `dim` values per id.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    dim: usize,
    variant: Variant,
    pub entities: Vec<f64>,
    pub relations: Vec<f64>,
    pub w: f64,
    pub b: f64,
}

impl ModelParams {
    /// Entries uniform on `[-1/sqrt(k), 1/sqrt(k)]`; `w = 1`, `b = 0`.
    pub fn init(
        num_entities: usize,
        num_relations: usize,
        dim: usize,
        variant: Variant,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation(
                "embedding dimension must be at least 1".into(),
            ));
        }
        let bound = 1.0 / (dim as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw =
            |n: usize| -> Vec<f64> { (0..n).map(|_| rng.random_range(-bound..=bound)).collect() };
        let entities = draw(num_entities * dim);
        let relations = draw(num_relations * dim);
        Ok(Self {
            dim,
            variant,
            entities,
            relations,
            w: 1.0,
            b: 0.0,
        })
    }

    pub fn from_parts(
        dim: usize,
        variant: Variant,
        entities: Vec<f64>,
        relations: Vec<f64>,
        w: f64,
        b: f64,
    ) -> Result<Self> {
        if dim == 0 || !entities.len().is_multiple_of(dim) || !relations.len().is_multiple_of(dim) {
            return Err(Error::Validation(format!(
                "matrix sizes {} and {} are not multiples of dimension {dim}",
                entities.len(),
                relations.len()
            )));
        }
        let params = Self {
            dim,
            variant,
            entities,
            relations,
            w,
            b,
        };
        if !params.is_finite() {
            return Err(Error::Validation("non-finite model parameter".into()));
        }
        Ok(params)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len() / self.dim
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len() / self.dim
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite()
            && self.b.is_finite()
            && self
                .entities
                .iter()
                .chain(&self.relations)
                .all(|v| v.is_finite())
    }

    pub fn entity(&self, id: usize) -> &[f64] {
        &self.entities[id * self.dim..(id + 1) * self.dim]
    }

    pub fn relation(&self, id: usize) -> &[f64] {
        &self.relations[id * self.dim..(id + 1) * self.dim]
    }

    pub fn check(&self, triple: &Triple) -> Result<()> {
        let (ne, nr) = (self.num_entities(), self.num_relations());
        for (kind, id, size) in [
            ("entity", triple.head, ne),
            ("relation", triple.relation, nr),
            ("entity", triple.tail, ne),
        ] {
            if id >= size {
                return Err(Error::IndexOutOfRange { kind, id, size });
            }
        }
        Ok(())
    }

    /// `g(h, r, t) = sum_i r_i h_i t_i`.
    pub fn plausibility(&self, triple: &Triple) -> Result<f64> {
        self.check(triple)?;
        Ok(self.plausibility_unchecked(triple))
    }

    pub(crate) fn plausibility_unchecked(&self, triple: &Triple) -> f64 {
        let h = self.entity(triple.head);
        let r = self.relation(triple.relation);
        let t = self.entity(triple.tail);
        h.iter().zip(r).zip(t).map(|((h, r), t)| r * (h * t)).sum()
    }

    pub fn map(&self, plausibility: f64) -> f64 {
        self.variant.map(plausibility, self.w, self.b)
    }

    pub fn confidence(&self, triple: &Triple) -> Result<f64> {
        Ok(self.map(self.plausibility(triple)?))
    }

    pub(crate) fn confidence_unchecked(&self, triple: &Triple) -> f64 {
        self.map(self.plausibility_unchecked(triple))
    }

    pub fn confidences(&self, triples: &[Triple]) -> Result<Vec<f64>> {
        triples.iter().map(|t| self.confidence(t)).collect()
    }

    /// Confidence of `(head, relation, e)` for every entity `e`, in id order.
    pub fn tail_confidences(&self, head: usize, relation: usize) -> Result<Vec<f64>> {
        self.check(&Triple::new(head, relation, head))?;
        let h = self.entity(head);
        let r = self.relation(relation);
        let hr: Vec<f64> = h.iter().zip(r).map(|(h, r)| r * h).collect();
        Ok(self
            .entities
            .chunks_exact(self.dim)
            .map(|t| self.map(hr.iter().zip(t).map(|(a, t)| a * t).sum()))
            .collect())
    }
}
