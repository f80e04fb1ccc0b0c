//! Evaluation: classification, noise injection, simulation sweeps, timing.

pub mod bench;
pub mod crossval;
pub mod data;
pub mod lda;
pub mod metrics;
pub mod noise;
pub mod sweep;

pub use bench::{
    benchmark_scaling, edge_pass_ladder, linear_fit, time_embed_score, BenchFamily, LinearFit,
    TimingRow,
};
pub use crossval::{
    cross_validate, crossval_vertex_classification, fold_features, fold_plan, stratified_folds,
    CrossValConfig, CrossValReport, EvalResult, Method, Timing,
};
pub use data::{load_dataset, prepare_graph, Dataset};
pub use lda::{lda_fit, lda_predict, LdaModel};
pub use metrics::{detection_metrics, DetectionRates};
pub use noise::{corrupt_labels, NoiseConfig};
pub use sweep::{simulation_sweep, SweepConfig, SweepResult, SweepRow};
