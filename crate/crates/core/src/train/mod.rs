//! Optimization of the joint objective with Adam, negative sampling and
//! validation-based early stopping.

mod adam;
mod config;
mod loss;
mod trainer;

pub use adam::{adam_step, AdamConfig, OptimizerState};
pub use config::{hyperparameter_grid, Ablation, TrainConfig};
pub use loss::{
    gradients, joint_loss, loss_observed, loss_unseen, regularization, Gradients, LossBreakdown,
    UnseenRules,
};
pub use trainer::{epoch_batches, format_log, mse, train, train_from, LogRecord, TrainOutcome};
