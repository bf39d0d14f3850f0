use super::loss::Gradients;
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

/// First and second moment estimates, shaped like the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    first: Gradients,
    second: Gradients,
    step: u64,
}

impl OptimizerState {
    pub fn new(params: &ModelParams) -> Self {
        Self {
            first: Gradients::zeros_like(params),
            second: Gradients::zeros_like(params),
            step: 0,
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

fn slices_mut(g: &mut Gradients) -> [&mut [f64]; 4] {
    [
        &mut g.entities,
        &mut g.relations,
        std::slice::from_mut(&mut g.w),
        std::slice::from_mut(&mut g.b),
    ]
}

fn param_slices_mut(p: &mut ModelParams) -> [&mut [f64]; 4] {
    [
        &mut p.entities,
        &mut p.relations,
        std::slice::from_mut(&mut p.w),
        std::slice::from_mut(&mut p.b),
    ]
}

/// One bias-corrected Adam update.
pub fn adam_step(
    params: &mut ModelParams,
    grads: &Gradients,
    state: &mut OptimizerState,
    config: &AdamConfig,
) {
    assert_eq!(
        params.entities.len(),
        grads.entities.len(),
        "gradient shape mismatch"
    );
    assert_eq!(
        params.relations.len(),
        grads.relations.len(),
        "gradient shape mismatch"
    );
    assert_eq!(
        state.first.entities.len(),
        grads.entities.len(),
        "optimizer state shape mismatch"
    );

    state.step += 1;
    let t = state.step as i32;
    let correct1 = 1.0 - config.beta1.powi(t);
    let correct2 = 1.0 - config.beta2.powi(t);
    let step_size = config.learning_rate / correct1;
    let (b1, b2, eps) = (config.beta1, config.beta2, config.epsilon);

    let p = param_slices_mut(params);
    let m = slices_mut(&mut state.first);
    let v = slices_mut(&mut state.second);
    for (((p, m), v), g) in p.into_iter().zip(m).zip(v).zip(grads.slices()) {
        for (((p, m), v), &g) in p.iter_mut().zip(m.iter_mut()).zip(v.iter_mut()).zip(g) {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= step_size * *m / ((*v / correct2).sqrt() + eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variant;

    fn config() -> AdamConfig {
        AdamConfig {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.99,
            epsilon: 1e-8,
        }
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut p = ModelParams::init(3, 1, 2, Variant::Logistic, 0).unwrap();
        let before = p.clone();
        let mut state = OptimizerState::new(&p);
        let g = Gradients::zeros_like(&p);
        for _ in 0..5 {
            adam_step(&mut p, &g, &mut state, &config());
        }
        assert_eq!(p, before);
        assert_eq!(state.step(), 5);
    }

    #[test]
    fn constant_gradient_moves_by_learning_rate() {
        let mut p = ModelParams::init(2, 1, 3, Variant::Logistic, 0).unwrap();
        let mut state = OptimizerState::new(&p);
        let mut g = Gradients::zeros_like(&p);
        g.entities.iter_mut().for_each(|v| *v = 0.3);
        g.relations.iter_mut().for_each(|v| *v = -2.0);
        g.w = 1e-3;
        let cfg = config();
        for _ in 0..999 {
            adam_step(&mut p, &g, &mut state, &cfg);
        }
        let before = p.clone();
        adam_step(&mut p, &g, &mut state, &cfg);
        for (a, b) in p.entities.iter().zip(&before.entities) {
            let delta = (b - a).abs();
            assert!(
                (delta - cfg.learning_rate).abs() <= 0.01 * cfg.learning_rate,
                "{delta}"
            );
        }
        for (a, b) in p.relations.iter().zip(&before.relations) {
            assert!(((a - b) - cfg.learning_rate).abs() <= 0.01 * cfg.learning_rate);
        }
        assert!(((before.w - p.w) - cfg.learning_rate).abs() <= 0.01 * cfg.learning_rate);
    }

    #[test]
    fn identical_inputs_give_identical_outputs() {
        let p0 = ModelParams::init(4, 2, 3, Variant::Rectifier, 3).unwrap();
        let mut g = Gradients::zeros_like(&p0);
        g.entities[1] = 0.5;
        g.b = -0.2;
        let (mut p1, mut p2) = (p0.clone(), p0.clone());
        let (mut s1, mut s2) = (OptimizerState::new(&p0), OptimizerState::new(&p0));
        adam_step(&mut p1, &g, &mut s1, &config());
        adam_step(&mut p2, &g, &mut s2, &config());
        assert_eq!(p1, p2);
        assert_eq!(s1, s2);
    }
}
