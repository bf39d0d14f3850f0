//! Lukasiewicz operators over soft truth values.
//!
//! Every public operator rejects inputs outside `[0, 1]`.

use crate::error::{Error, Result};

fn unit(x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::Domain(x))
    }
}

// min - (1 - max) is exact whenever 1 - max is (always, for max >= 0.5),
// keeps the conjunction commutative bit-for-bit and makes 1 an exact identity.
pub(crate) fn and_unchecked(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    (lo - (1.0 - hi)).max(0.0)
}

pub(crate) fn distance_unchecked(body: f64, head: f64) -> f64 {
    (body - head).max(0.0)
}

/// `max(0, a + b - 1)`.
pub fn luk_and(a: f64, b: f64) -> Result<f64> {
    Ok(and_unchecked(unit(a)?, unit(b)?))
}

/// `min(1, a + b)`.
pub fn luk_or(a: f64, b: f64) -> Result<f64> {
    Ok((unit(a)? + unit(b)?).min(1.0))
}

/// `1 - a`.
pub fn luk_neg(a: f64) -> Result<f64> {
    Ok(1.0 - unit(a)?)
}

/// Truth value of `body -> head`, i.e. `min(1, 1 - body + head)`.
pub fn rule_value(body: f64, head: f64) -> Result<f64> {
    Ok(1.0 - distance_to_satisfaction(body, head)?)
}

/// `max(0, body - head)`; zero exactly when `head >= body`.
pub fn distance_to_satisfaction(body: f64, head: f64) -> Result<f64> {
    Ok(distance_unchecked(unit(body)?, unit(head)?))
}

/// Distance of the negation prior on an unseen triple: its own confidence.
pub fn prior_rule_distance(head_confidence: f64) -> Result<f64> {
    unit(head_confidence)
}
