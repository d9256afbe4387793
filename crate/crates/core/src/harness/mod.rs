//! Experiment configuration, Monte-Carlo runner and output writers.

mod config;
mod output;
mod runner;

pub use config::{
    ChannelSection, ExperimentConfig, GridSection, LambdaMode, MimoSection, OutputSection,
    WeightsSection, CONFIG_KEYS,
};
pub use output::{read_metrics_csv, write_outputs, Manifest, ManifestEntry, MetricRow};
pub use runner::{run_experiment, sweep, Aggregate, DropFailure, DropRecord, MetricsReport};
