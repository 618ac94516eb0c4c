//! Experiment harness: configs, dataset preparation, training runs and their
//! on-disk artifacts.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod metrics;
pub mod parallel;
pub mod run;

pub use commands::{
    cross_validate_command, eval_command, generate, train_command, EvalData, GenerateSummary, GenerateTask,
};
pub use config::{DatasetSpec, EventLog, ExperimentConfig, SplitSpec};
pub use dataset::{prepare, Dataset, EncoderState, Prepared};
pub use metrics::{CrossValidationReport, FoldResult, MetricsReport, Summary};
pub use parallel::{run_jobs, Execution};
pub use run::{cross_validate, evaluate, train, Checkpoint, TrainOutcome};
