//! Dataset runs, reports and branching/buffer sweeps.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dataset::TaskInstance;
use super::evaluate::evaluate;
use crate::constraints::ConstraintSet;
use crate::generation::StepGenerator;
use crate::search::{derive_seed, run_end_to_end, run_tree_search, SearchError, SearchTrace};
use crate::selection::Scorer;
use crate::types::{CandidatePool, ContractError, DecodeConfig, ReasoningTree};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
const INSTANCE_STREAM: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "tree")]
    Tree,
    #[serde(rename = "end2end")]
    EndToEnd,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tree" => Ok(Mode::Tree),
            "end2end" => Ok(Mode::EndToEnd),
            other => Err(format!("unknown mode {other:?} (expected tree or end2end)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub config: DecodeConfig,
    /// Chains sampled per instance in end-to-end mode.
    pub samples: usize,
    pub keep_trees: bool,
    pub timing: bool,
}

impl ExperimentSpec {
    pub fn new(mode: Mode, config: DecodeConfig) -> Self {
        ExperimentSpec {
            mode,
            config,
            samples: 16,
            keep_trees: false,
            timing: false,
        }
    }
}

/// Candidates for one prompt plus what producing them cost.
#[derive(Debug, Clone)]
pub struct Decoded {
    pub pool: CandidatePool,
    pub tree: Option<ReasoningTree>,
    pub trace: Option<SearchTrace>,
    pub tokens: usize,
    pub generator_calls: usize,
}

pub fn decode_prompt(
    prompt: &str,
    question: &str,
    mode: Mode,
    config: &DecodeConfig,
    samples: usize,
    generator: &dyn StepGenerator,
    constraints: &ConstraintSet,
) -> Result<Decoded, SearchError> {
    match mode {
        Mode::Tree => {
            let out = run_tree_search(prompt, question, generator, constraints, config)?;
            Ok(Decoded {
                tokens: out.trace.total_generated_tokens,
                generator_calls: out.trace.generator_calls,
                pool: out.pool,
                tree: Some(out.tree),
                trace: Some(out.trace),
            })
        }
        Mode::EndToEnd => {
            let out = run_end_to_end(prompt, generator, config, samples)?;
            Ok(Decoded {
                pool: out.pool,
                tree: None,
                trace: None,
                tokens: out.total_generated_tokens,
                generator_calls: out.generator_calls,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    pub seed: u64,
    pub gold_answer: String,
    pub chosen_answer: Option<String>,
    pub correct: bool,
    pub upper_bound: bool,
    pub pool_size: usize,
    pub tokens: usize,
    pub generator_calls: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub mode: Mode,
    pub scorer: String,
    pub generator: String,
    pub seed: u64,
    pub samples: Option<usize>,
    pub config_snapshot: DecodeConfig,
    pub instances: usize,
    pub failed: usize,
    pub accuracy: f64,
    pub upper_bound_accuracy: f64,
    pub total_tokens: usize,
    pub records: Vec<InstanceRecord>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    /// (instance id, tree) in report order; filled in tree mode when `keep_trees` is set.
    pub trees: Vec<(String, ReasoningTree)>,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ContractError),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("{failed} of {total} instances failed; first failure ({id}): {first}")]
    TooManyFailures {
        failed: usize,
        total: usize,
        id: String,
        first: String,
    },
}

struct InstanceResult {
    record: InstanceRecord,
    tree: Option<ReasoningTree>,
}

fn run_instance(
    inst: &TaskInstance,
    seed: u64,
    spec: &ExperimentSpec,
    scorer: &dyn Scorer,
    generator: &dyn StepGenerator,
    constraints: &ConstraintSet,
) -> InstanceResult {
    let started = Instant::now();
    let config = DecodeConfig {
        rng_seed: seed,
        ..spec.config.clone()
    };
    let mut record = InstanceRecord {
        id: inst.id.clone(),
        seed,
        gold_answer: inst.gold_answer.clone(),
        chosen_answer: None,
        correct: false,
        upper_bound: false,
        pool_size: 0,
        tokens: 0,
        generator_calls: 0,
        error: None,
        wall_time_ms: None,
    };
    let mut tree = None;
    match decode_prompt(
        &inst.prompt,
        &inst.question,
        spec.mode,
        &config,
        spec.samples,
        generator,
        constraints,
    ) {
        Ok(decoded) => {
            record.pool_size = decoded.pool.len();
            record.tokens = decoded.tokens;
            record.generator_calls = decoded.generator_calls;
            match evaluate(
                &decoded.pool,
                &inst.gold_answer,
                inst.task_kind,
                scorer,
                &inst.question,
            ) {
                Ok(e) => {
                    record.chosen_answer = e.chosen_answer;
                    record.correct = e.correct;
                    record.upper_bound = e.upper_bound;
                }
                Err(e) => record.error = Some(format!("selection: {e}")),
            }
            if spec.keep_trees {
                tree = decoded.tree;
            }
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    if spec.timing {
        record.wall_time_ms = Some(started.elapsed().as_millis() as u64);
    }
    InstanceResult { record, tree }
}

/// Decodes, selects and grades every instance. Instances run in parallel, each with a
/// seed derived from the config seed and its position, so results do not depend on
/// scheduling. Failed instances count as incorrect; more than half failing aborts.
pub fn run_experiment(
    dataset: &[TaskInstance],
    spec: &ExperimentSpec,
    scorer: &dyn Scorer,
    generator: &dyn StepGenerator,
    constraints: &ConstraintSet,
) -> Result<RunOutput, ExperimentError> {
    spec.config.validate()?;
    if spec.mode == Mode::EndToEnd && spec.samples == 0 {
        return Err(ContractError::invalid("samples", "must be >= 1").into());
    }
    if dataset.is_empty() {
        return Err(ExperimentError::EmptyDataset);
    }
    let base = spec.config.rng_seed;
    let mut results: Vec<InstanceResult> = dataset
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let seed = derive_seed(base, INSTANCE_STREAM, i as u64);
            run_instance(inst, seed, spec, scorer, generator, constraints)
        })
        .collect();
    results.sort_by(|a, b| a.record.id.cmp(&b.record.id));

    let total = results.len();
    let failed: Vec<&InstanceRecord> = results
        .iter()
        .map(|r| &r.record)
        .filter(|r| r.error.is_some())
        .collect();
    if failed.len() * 2 > total {
        return Err(ExperimentError::TooManyFailures {
            failed: failed.len(),
            total,
            id: failed[0].id.clone(),
            first: failed[0].error.clone().unwrap_or_default(),
        });
    }
    let failed = failed.len();
    let correct = results.iter().filter(|r| r.record.correct).count();
    let upper = results.iter().filter(|r| r.record.upper_bound).count();
    let total_tokens = results.iter().map(|r| r.record.tokens).sum();
    let mut trees = Vec::new();
    let mut records = Vec::with_capacity(total);
    for r in results {
        if let Some(t) = r.tree {
            trees.push((r.record.id.clone(), t));
        }
        records.push(r.record);
    }
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        mode: spec.mode,
        scorer: scorer.name().to_string(),
        generator: generator.name().to_string(),
        seed: base,
        samples: (spec.mode == Mode::EndToEnd).then_some(spec.samples),
        config_snapshot: spec.config.clone(),
        instances: total,
        failed,
        accuracy: correct as f64 / total as f64,
        upper_bound_accuracy: upper as f64 / total as f64,
        total_tokens,
        records,
    };
    Ok(RunOutput { report, trees })
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub branching_factor: usize,
    pub buffer_size: usize,
    pub report: RunReport,
}

/// One run per (branching factor, buffer size) pair, branching varying fastest.
pub fn run_sweep(
    dataset: &[TaskInstance],
    spec: &ExperimentSpec,
    branching: &[usize],
    buffers: &[usize],
    scorer: &dyn Scorer,
    generator: &dyn StepGenerator,
    constraints: &ConstraintSet,
) -> Result<Vec<SweepCell>, ExperimentError> {
    if branching.is_empty() || buffers.is_empty() {
        return Err(ContractError::Empty("sweep grid").into());
    }
    let mut cells = Vec::with_capacity(branching.len() * buffers.len());
    for &buffer_size in buffers {
        for &branching_factor in branching {
            let cell_spec = ExperimentSpec {
                config: DecodeConfig {
                    branching_factor,
                    buffer_size,
                    ..spec.config.clone()
                },
                keep_trees: false,
                ..spec.clone()
            };
            let out = run_experiment(dataset, &cell_spec, scorer, generator, constraints)?;
            cells.push(SweepCell {
                branching_factor,
                buffer_size,
                report: out.report,
            });
        }
    }
    Ok(cells)
}
