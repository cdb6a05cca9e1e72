//! Topology files, failure-scenario and structure documents, the experiment
//! harness and the `tree-route` command line, built on `tree-route-core`.

pub mod cli;
pub mod document;
pub mod error;
pub mod experiment;
pub mod topology;

pub use error::{Error, Result};
pub use experiment::{
    aggregate, emit_csv, run_bench, run_experiment, runtime_bins, spearman, time_precompute,
    BenchConfig, ExperimentConfig, GraphFamily, MetricRow, Results, RunRecord,
};
pub use topology::Topology;
