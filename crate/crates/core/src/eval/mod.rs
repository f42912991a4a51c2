//! Weather correction of measured power, error metrics, k-fold
//! cross-validation and the model-versus-theory benchmark.

mod benchmark;
mod binned;
mod correct;
mod kfold;
mod metrics;
mod report;

pub use benchmark::{
    benchmark, BenchmarkCell, BenchmarkMatrix, BenchmarkSetup, CalmCandidate, PhysicsPredictor,
    NN_ROW, NO_CORRECTION,
};
pub use binned::{binned_mape, Bin, DEFAULT_BINS};
pub use correct::{weather_correct, CorrectionOutcome};
pub use kfold::{kfold_assignments, kfold_evaluate, KFoldReport, Predictor};
pub use metrics::{
    absolute_percentage_errors, mean_report, metrics, metrics_partial, metrics_with,
    MapeDenominator, MetricReport,
};
pub use report::{benchmark_csv, benchmark_svg, bins_csv, bins_svg};
