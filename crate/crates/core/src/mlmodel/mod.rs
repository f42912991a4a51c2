//! Feedforward network mapping six engineered features to brake power.

mod features;
mod network;
mod train;

pub use features::{engineer_features, FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
pub use network::{
    sigmoid, softplus, FnnModel, Gradient, Layer, Scaling, TargetTransform, DEFAULT_LAYERS, SCHEMA,
};
pub use train::{
    gradient_check, gradient_check_rows, train, train_features, train_rows, TrainConfig,
    TrainOutcome,
};
