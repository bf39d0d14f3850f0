use serde::{Deserialize, Serialize};

use crate::data::WeightedTriple;
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceMetrics {
    pub mse: f64,
    pub mae: f64,
    pub count: usize,
}

/// Mean squared and absolute error of predicted confidences. Negatives are
/// scored against their stored target (zero) when `include_negatives` is set.
pub fn confidence_metrics(
    params: &ModelParams,
    test: &[WeightedTriple],
    negatives: &[WeightedTriple],
    include_negatives: bool,
) -> Result<ConfidenceMetrics> {
    if test.is_empty() {
        return Err(Error::Evaluation(
            "confidence prediction needs a non-empty test set".into(),
        ));
    }
    let extra: &[WeightedTriple] = if include_negatives { negatives } else { &[] };
    let (mut se, mut ae) = (0.0, 0.0);
    for fact in test.iter().chain(extra) {
        let err = params.confidence(&fact.triple)? - fact.score;
        se += err * err;
        ae += err.abs();
    }
    let count = test.len() + extra.len();
    Ok(ConfidenceMetrics {
        mse: se / count as f64,
        mae: ae / count as f64,
        count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Triple;
    use crate::model::Variant;
    use proptest::prelude::*;

    // relation i scales a fixed unit product, so f(0, i, 1) = x_i under the rectifier
    fn predictor(xs: &[f64]) -> ModelParams {
        ModelParams::from_parts(1, Variant::Rectifier, vec![1.0, 1.0], xs.to_vec(), 1.0, 0.0)
            .unwrap()
    }

    fn fact(r: usize, s: f64) -> WeightedTriple {
        WeightedTriple::new(Triple::new(0, r, 1), s)
    }

    #[test]
    fn perfect_predictor() {
        let p = predictor(&[0.2, 0.7]);
        let m = confidence_metrics(&p, &[fact(0, 0.2), fact(1, 0.7)], &[], true).unwrap();
        assert_eq!((m.mse, m.mae, m.count), (0.0, 0.0, 2));
    }

    #[test]
    fn hand_computed_errors() {
        // errors +0.1 and -0.3
        let p = predictor(&[0.5, 0.25]);
        let m = confidence_metrics(&p, &[fact(0, 0.4), fact(1, 0.55)], &[], false).unwrap();
        assert!((m.mse - 0.05).abs() < 1e-15);
        assert!((m.mae - 0.2).abs() < 1e-15);
    }

    #[test]
    fn constant_half_against_binary_targets() {
        let p = predictor(&[0.5, 0.5]);
        let m = confidence_metrics(&p, &[fact(0, 1.0)], &[fact(1, 0.0)], true).unwrap();
        assert_eq!((m.mse, m.mae, m.count), (0.25, 0.5, 2));
        let positives_only =
            confidence_metrics(&p, &[fact(0, 1.0)], &[fact(1, 0.0)], false).unwrap();
        assert_eq!(positives_only.count, 1);
    }

    #[test]
    fn empty_test_set_is_an_error() {
        assert!(confidence_metrics(&predictor(&[0.5]), &[], &[], true).is_err());
    }

    proptest! {
        #[test]
        fn mse_dominates_squared_mae(
            xs in proptest::collection::vec(0.0f64..1.0, 1..20),
            targets in proptest::collection::vec(0.0f64..=1.0, 20),
        ) {
            let p = predictor(&xs);
            let test: Vec<_> = xs.iter().enumerate().map(|(i, _)| fact(i, targets[i])).collect();
            let m = confidence_metrics(&p, &test, &[], false).unwrap();
            prop_assert!(m.mse + 1e-15 >= m.mae * m.mae);
        }
    }
}
