use serde::{Deserialize, Serialize};

use super::{RawTriple, WeightedTriple};
use crate::error::{Error, Result};

/// How raw confidence values are mapped into `[floor, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Normalization {
    /// Clamp to `[lo, hi]`, then map `ln x` affinely onto `[floor, 1]`.
    LogMinMax { lo: f64, hi: f64, floor: f64 },
    /// Map the observed raw range affinely onto `[floor, 1]`.
    MinMax { floor: f64 },
    /// Scores must already lie in `[0, 1]`.
    Identity,
}

impl Normalization {
    fn validate(&self) -> Result<()> {
        let check_floor = |floor: f64| {
            if (0.0..=1.0).contains(&floor) {
                Ok(())
            } else {
                Err(Error::Validation(format!("floor {floor} outside [0, 1]")))
            }
        };
        match *self {
            Normalization::LogMinMax { lo, hi, floor } => {
                if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                    return Err(Error::Validation(format!(
                        "log-min-max needs 0 < lo < hi, got lo={lo} hi={hi}"
                    )));
                }
                check_floor(floor)
            }
            Normalization::MinMax { floor } => check_floor(floor),
            Normalization::Identity => Ok(()),
        }
    }
}

pub fn normalize_scores(
    triples: &[RawTriple],
    method: Normalization,
) -> Result<Vec<WeightedTriple>> {
    method.validate()?;
    if let Some(bad) = triples.iter().find(|t| !t.raw_score.is_finite()) {
        return Err(Error::Validation(format!(
            "non-finite score {}",
            bad.raw_score
        )));
    }

    let map: Box<dyn Fn(f64) -> Result<f64>> = match method {
        Normalization::LogMinMax { lo, hi, floor } => {
            let (log_lo, log_hi) = (lo.ln(), hi.ln());
            Box::new(move |x: f64| {
                if x <= 0.0 {
                    return Err(Error::Validation(format!(
                        "non-positive score {x} under log normalization"
                    )));
                }
                let unit = (x.clamp(lo, hi).ln() - log_lo) / (log_hi - log_lo);
                Ok(floor + (1.0 - floor) * unit)
            })
        }
        Normalization::MinMax { floor } => {
            let min = triples
                .iter()
                .map(|t| t.raw_score)
                .fold(f64::INFINITY, f64::min);
            let max = triples
                .iter()
                .map(|t| t.raw_score)
                .fold(f64::NEG_INFINITY, f64::max);
            let span = max - min;
            Box::new(move |x: f64| {
                if span > 0.0 {
                    Ok(floor + (1.0 - floor) * (x - min) / span)
                } else {
                    Ok(1.0)
                }
            })
        }
        Normalization::Identity => Box::new(|x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(x)
            } else {
                Err(Error::Validation(format!(
                    "score {x} outside [0, 1] under identity normalization"
                )))
            }
        }),
    };

    triples
        .iter()
        .map(|t| {
            Ok(WeightedTriple::new(
                t.triple,
                map(t.raw_score)?.clamp(0.0, 1.0),
            ))
        })
        .collect()
}
