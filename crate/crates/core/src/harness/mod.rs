//! Datasets, experiment runs, reports and tree export.

pub mod config_file;
pub mod dataset;
pub mod evaluate;
pub mod experiment;
pub mod export;
pub mod prompts;

pub use dataset::{load_dataset, parse_dataset, write_dataset, DatasetError, TaskInstance};
pub use evaluate::{evaluate, Evaluation};
pub use experiment::{
    decode_prompt, run_experiment, run_sweep, Decoded, ExperimentError, ExperimentSpec,
    InstanceRecord, Mode, RunOutput, RunReport, SweepCell,
};
pub use export::{export_tree, tree_from_json, tree_to_dot, tree_to_json, TreeFormat};
