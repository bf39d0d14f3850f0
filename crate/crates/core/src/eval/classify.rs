//! Strong/weak fact classification by a one-feature logistic regression on
//! the model's predicted confidence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 100;
const TOLERANCE: f64 = 1e-8;

/// Logistic model `p(x) = sigmoid(slope * (x - mean) / scale + intercept)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub slope: f64,
    pub intercept: f64,
    pub mean: f64,
    pub scale: f64,
    pub iterations: usize,
}

fn log_sigmoid(u: f64) -> f64 {
    // -softplus(-u)
    -((-u).max(0.0) + (-u.abs()).exp().ln_1p())
}

fn log_likelihood(z: &[f64], y: &[bool], a: f64, c: f64) -> f64 {
    z.iter()
        .zip(y)
        .map(|(&z, &y)| {
            let u = a * z + c;
            if y {
                log_sigmoid(u)
            } else {
                log_sigmoid(-u)
            }
        })
        .sum()
}

impl LogisticFit {
    fn standardize(&self, x: f64) -> f64 {
        if self.scale > 0.0 {
            (x - self.mean) / self.scale
        } else {
            0.0
        }
    }

    pub fn logit(&self, x: f64) -> f64 {
        self.slope * self.standardize(x) + self.intercept
    }

    pub fn probability(&self, x: f64) -> f64 {
        log_sigmoid(self.logit(x)).exp()
    }

    /// Strong iff `p(x) >= 0.5`.
    pub fn predict(&self, x: f64) -> bool {
        self.logit(x) >= 0.0
    }
}

/// Maximum-likelihood fit by Newton's method with backtracking.
pub fn fit_logistic(xs: &[f64], labels: &[bool]) -> Result<LogisticFit> {
    if xs.len() != labels.len() {
        return Err(Error::Evaluation("feature and label counts differ".into()));
    }
    let n = xs.len();
    let positives = labels.iter().filter(|&&y| y).count();
    if positives == 0 || positives == n {
        return Err(Error::Evaluation(
            "classifier training data must contain both strong and weak facts".into(),
        ));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Evaluation("non-finite classifier feature".into()));
    }

    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    let scale = var.sqrt();
    let base_rate = positives as f64 / n as f64;
    let prior_logit = (base_rate / (1.0 - base_rate)).ln();
    if scale <= 1e-12 * mean.abs().max(1.0) {
        return Ok(LogisticFit {
            slope: 0.0,
            intercept: prior_logit,
            mean,
            scale: 0.0,
            iterations: 0,
        });
    }
    let z: Vec<f64> = xs.iter().map(|x| (x - mean) / scale).collect();

    let (mut a, mut c) = (0.0, prior_logit);
    let mut ll = log_likelihood(&z, labels, a, c);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (mut ga, mut gc, mut haa, mut hac, mut hcc) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&z, &y) in z.iter().zip(labels) {
            let p = log_sigmoid(a * z + c).exp();
            let r = f64::from(u8::from(y)) - p;
            let w = p * (1.0 - p);
            ga += r * z;
            gc += r;
            haa += w * z * z;
            hac += w * z;
            hcc += w;
        }
        let det = haa * hcc - hac * hac;
        let (da, dc) = if det > 1e-300 {
            ((hcc * ga - hac * gc) / det, (haa * gc - hac * ga) / det)
        } else {
            (ga, gc)
        };

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let (na, nc) = (a + step * da, c + step * dc);
            let nll = log_likelihood(&z, labels, na, nc);
            if nll >= ll {
                accepted = Some((na, nc, nll));
                break;
            }
            step *= 0.5;
        }
        let Some((na, nc, nll)) = accepted else { break };
        let moved = (na - a).abs().max((nc - c).abs());
        let gained = nll - ll;
        (a, c, ll) = (na, nc, nll);
        if moved < TOLERANCE || gained < TOLERANCE * ll.abs().max(1.0) {
            break;
        }
    }

    Ok(LogisticFit {
        slope: a,
        intercept: c,
        mean,
        scale,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    /// F1 on the strong class.
    pub f1: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub train_count: usize,
    pub test_count: usize,
}

/// Binary metrics with `true` as the positive class.
pub fn binary_metrics(predicted: &[bool], actual: &[bool]) -> (f64, f64, f64, f64) {
    let (mut tp, mut fp, mut fn_, mut tn) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p, a) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let f1 = ratio(2 * tp, 2 * tp + fp + fn_);
    let accuracy = ratio(tp + tn, tp + tn + fp + fn_);
    (f1, accuracy, ratio(tp, tp + fp), ratio(tp, tp + fn_))
}

/// Fits on `train` and scores `test`; each pair is `(confidence, is_strong)`.
pub fn classify_strong(
    train: &[(f64, bool)],
    test: &[(f64, bool)],
) -> Result<ClassificationMetrics> {
    if test.is_empty() {
        return Err(Error::Evaluation(
            "classification needs a non-empty test set".into(),
        ));
    }
    let (xs, ys): (Vec<f64>, Vec<bool>) = train.iter().copied().unzip();
    let fit = fit_logistic(&xs, &ys)?;
    let predicted: Vec<bool> = test.iter().map(|&(x, _)| fit.predict(x)).collect();
    let actual: Vec<bool> = test.iter().map(|&(_, y)| y).collect();
    let (f1, accuracy, precision, recall) = binary_metrics(&predicted, &actual);
    Ok(ClassificationMetrics {
        f1,
        accuracy,
        precision,
        recall,
        train_count: train.len(),
        test_count: test.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // overlapping classes: positives centred near 0.7, negatives near 0.4
    fn fixture() -> Vec<(f64, bool)> {
        let pos = [0.95, 0.88, 0.81, 0.77, 0.72, 0.69, 0.64, 0.58, 0.52, 0.45];
        let neg = [0.71, 0.6, 0.55, 0.48, 0.42, 0.37, 0.33, 0.27, 0.19, 0.1];
        pos.iter()
            .map(|&x| (x, true))
            .chain(neg.iter().map(|&x| (x, false)))
            .collect()
    }

    /// Independent oracle: plain gradient ascent on raw x.
    fn gradient_ascent_fit(data: &[(f64, bool)]) -> (f64, f64) {
        let (mut a, mut c) = (0.0f64, 0.0f64);
        for _ in 0..400_000 {
            let (mut ga, mut gc) = (0.0, 0.0);
            for &(x, y) in data {
                let p = 1.0 / (1.0 + (-(a * x + c)).exp());
                let r = if y { 1.0 } else { 0.0 } - p;
                ga += r * x;
                gc += r;
            }
            a += 0.5 * ga;
            c += 0.5 * gc;
        }
        (a, c)
    }

    #[test]
    fn newton_matches_gradient_ascent_oracle() {
        let data = fixture();
        let (xs, ys): (Vec<f64>, Vec<bool>) = data.iter().copied().unzip();
        let fit = fit_logistic(&xs, &ys).unwrap();
        let (a, c) = gradient_ascent_fit(&data);
        for x in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let oracle = 1.0 / (1.0 + (-(a * x + c)).exp());
            assert!((fit.probability(x) - oracle).abs() < 1e-6, "x = {x}");
        }

        // threshold sweep: classify x >= -c/a and compare metrics
        let threshold = -c / a;
        let predicted: Vec<bool> = xs.iter().map(|&x| x >= threshold).collect();
        let expected = binary_metrics(&predicted, &ys);
        let m = classify_strong(&data, &data).unwrap();
        assert!((m.f1 - expected.0).abs() < 1e-12);
        assert!((m.accuracy - expected.1).abs() < 1e-12);
        assert!(m.accuracy > 0.7);
    }

    #[test]
    fn half_probability_counts_as_strong() {
        let fit = LogisticFit {
            slope: 1.0,
            intercept: 0.0,
            mean: 0.5,
            scale: 1.0,
            iterations: 0,
        };
        assert!(fit.predict(0.5));
        assert!(!fit.predict(0.4999));
    }

    #[test]
    fn single_class_is_an_error() {
        assert!(fit_logistic(&[0.1, 0.2], &[true, true]).is_err());
        assert!(classify_strong(&[(0.1, false)], &[(0.1, false)]).is_err());
    }

    #[test]
    fn constant_feature_predicts_majority() {
        let fit = fit_logistic(&[0.4; 5], &[true, true, true, false, false]).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert!((fit.probability(0.4) - 0.6).abs() < 1e-12);
        assert!(fit.predict(0.0));
    }

    #[test]
    fn separable_data_terminates_and_separates() {
        let xs = [0.1, 0.2, 0.3, 0.7, 0.8, 0.9];
        let ys = [false, false, false, true, true, true];
        let fit = fit_logistic(&xs, &ys).unwrap();
        assert!(fit.iterations <= MAX_ITERATIONS);
        for (&x, &y) in xs.iter().zip(&ys) {
            assert_eq!(fit.predict(x), y);
        }
    }

    #[test]
    fn metric_formulas() {
        let (f1, acc, p, r) =
            binary_metrics(&[true, true, false, false], &[true, false, true, false]);
        assert_eq!((f1, acc, p, r), (0.5, 0.5, 0.5, 0.5));
        let (f1, ..) = binary_metrics(&[false, false], &[false, false]);
        assert_eq!(f1, 0.0);
    }

    proptest! {
        #[test]
        fn positive_affine_transform_is_invariant(
            scale in 0.1f64..10.0,
            shift in -5.0f64..5.0,
        ) {
            let data = fixture();
            let moved: Vec<(f64, bool)> = data.iter().map(|&(x, y)| (scale * x + shift, y)).collect();
            let a = classify_strong(&data, &data).unwrap();
            let b = classify_strong(&moved, &moved).unwrap();
            prop_assert_eq!(a.f1, b.f1);
            prop_assert_eq!(a.accuracy, b.accuracy);
        }
    }
}
