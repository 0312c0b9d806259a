//! Step-level tree search.
//!
//! Each depth iteration expands every frontier leaf into `branching_factor` candidate
//! steps, gates each candidate through the constraints (regenerating up to
//! `max_regeneration_attempts` times), then prunes the new leaves back to the buffer
//! by sampling from the softmax of their step scores at the annealed temperature.
//! Surviving leaves that are terminal or at the depth cap move to the candidate pool;
//! the rest form the next frontier. Pool plus frontier never exceed the buffer.

mod prune;

pub use prune::{prune_frontier, tau_to_greedy, GREEDY_TAU};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{
    gate_decision, ConstraintSet, ConstraintVerdict, GateDecision, Violation,
};
use crate::generation::{
    rotate_sampling_params, split_into_steps, FinishReason, GenerationContext, GenerationError,
    StepGenerator, END_TO_END_MARKERS,
};
use crate::scoring::anneal_temperature;
use crate::types::{
    CandidatePool, ContractError, DecodeConfig, NodeId, NodeStatus, PoolOrigin, ReasoningChain,
    ReasoningStep, ReasoningTree, TreeError,
};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ContractError),
    #[error("generation failed while expanding {node}: {cause}")]
    Generation {
        node: NodeId,
        cause: GenerationError,
    },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("node {0} cannot be expanded: {1}")]
    NotExpandable(NodeId, &'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionOutcome {
    pub node_id: NodeId,
    pub produced: Vec<NodeId>,
    /// Candidate attempts rejected by a constraint (including duplicates and empty steps).
    pub pruned_by_constraint: usize,
    pub exhausted: bool,
    pub tokens: usize,
    pub generator_calls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthRecord {
    pub depth: usize,
    pub temperature: f64,
    pub expanded: usize,
    pub frontier_before: usize,
    pub frontier_after: usize,
    pub pooled: usize,
    pub tokens: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub depths: Vec<DepthRecord>,
    pub total_generated_tokens: usize,
    pub generator_calls: usize,
    pub rejected_candidates: usize,
}

/// Exact number of tokens generated, including rejected candidates.
pub fn account_tokens(trace: &SearchTrace) -> usize {
    trace.total_generated_tokens
}

/// Upper bound on generated tokens for a tree search under `config`.
pub fn token_bound(config: &DecodeConfig) -> usize {
    config.branching_factor
        * config.buffer_size
        * config.max_depth
        * config.max_step_tokens
        * (1 + config.max_regeneration_attempts)
}

#[derive(Debug, Clone)]
pub struct SearchOutput {
    pub pool: CandidatePool,
    pub pool_nodes: Vec<NodeId>,
    pub tree: ReasoningTree,
    pub trace: SearchTrace,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent sub-seed for a (run seed, stream, index) triple.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_mul(0x632B_E59B_D9B4_E019) ^ splitmix64(index)))
}

const EXPAND_STREAM: u64 = 1;
const PRUNE_STREAM: u64 = 2;
const SAMPLE_STREAM: u64 = 3;

/// Expands one active leaf into at most `branching_factor` children.
#[allow(clippy::too_many_arguments)]
pub fn expand_leaf(
    tree: &mut ReasoningTree,
    node_id: NodeId,
    question: &str,
    generator: &dyn StepGenerator,
    constraints: &ConstraintSet,
    config: &DecodeConfig,
    rng: &mut dyn RngCore,
) -> Result<ExpansionOutcome, SearchError> {
    let node = tree.node(node_id)?;
    if node.status != NodeStatus::Active {
        return Err(SearchError::NotExpandable(node_id, "node is not active"));
    }
    if !node.children.is_empty() {
        return Err(SearchError::NotExpandable(node_id, "node is not a leaf"));
    }
    if node.depth >= config.max_depth {
        return Err(SearchError::NotExpandable(node_id, "node is at max depth"));
    }
    let ancestors: Vec<String> = tree
        .path_steps(node_id)?
        .into_iter()
        .map(|s| s.text.clone())
        .collect();
    let ancestor_refs: Vec<&str> = ancestors.iter().map(String::as_str).collect();

    let mut outcome = ExpansionOutcome {
        node_id,
        produced: Vec::new(),
        pruned_by_constraint: 0,
        exhausted: false,
        tokens: 0,
        generator_calls: 0,
    };
    let mut accepted: Vec<ReasoningStep> = Vec::new();

    for branch in 0..config.branching_factor {
        let params = rotate_sampling_params(&config.token_sampling_schedule, branch);
        let mut attempt = 0;
        loop {
            let mut ctx =
                GenerationContext::new(tree.prompt.clone(), params.clone(), config.max_step_tokens)
                    .with_prior_steps(ancestors.clone());
            ctx.seed = Some(rng.next_u64());
            let generated =
                generator
                    .generate_step(&ctx, rng)
                    .map_err(|cause| SearchError::Generation {
                        node: node_id,
                        cause,
                    })?;
            outcome.generator_calls += 1;
            outcome.tokens += generated.tokens.len();
            let ended = generated.finish_reason == FinishReason::Eos;
            let (step, verdict) =
                match ReasoningStep::from_tokens(generated.tokens, config.length_penalty, ended) {
                    Ok(step) => {
                        let verdict = if ancestor_refs.contains(&step.text.as_str())
                            || accepted.iter().any(|s| s.text == step.text)
                        {
                            ConstraintVerdict::fail(
                                Violation::Repetition,
                                format!("duplicate of an existing step: {:?}", step.text),
                            )
                        } else {
                            constraints.check(&step.text, question, &ancestor_refs)
                        };
                        (Some(step), verdict)
                    }
                    Err(e) => (
                        None,
                        ConstraintVerdict::fail(
                            Violation::Repetition,
                            format!("unusable step: {e}"),
                        ),
                    ),
                };
            if !verdict.passed {
                outcome.pruned_by_constraint += 1;
            }
            match gate_decision(verdict.passed, attempt, config.max_regeneration_attempts) {
                GateDecision::Accept => {
                    accepted.push(step.expect("accepted steps exist"));
                    break;
                }
                GateDecision::Regenerate => attempt += 1,
                GateDecision::Prune => break,
            }
        }
    }

    for step in accepted {
        outcome.produced.push(tree.add_child(node_id, step)?);
    }
    if outcome.produced.is_empty() {
        tree.set_status(node_id, NodeStatus::Exhausted)?;
        outcome.exhausted = true;
    }
    Ok(outcome)
}

/// Runs the full tree search for one prompt. `question` is the context the repetition
/// and contradiction checks compare against.
pub fn run_tree_search(
    prompt: &str,
    question: &str,
    generator: &dyn StepGenerator,
    constraints: &ConstraintSet,
    config: &DecodeConfig,
) -> Result<SearchOutput, SearchError> {
    config.validate()?;
    let seed = config.rng_seed;
    let mut tree = ReasoningTree::new(prompt, config.clone());
    let mut trace = SearchTrace::default();
    let mut pool_nodes: Vec<NodeId> = Vec::new();
    let mut depth = 0usize;

    while !tree.frontier.is_empty() {
        let tau = anneal_temperature(
            config.step_temperature,
            config.annealing_factor,
            depth as u32,
        );
        let frontier = std::mem::take(&mut tree.frontier);
        let mut new_leaves = Vec::new();
        let mut tokens = 0;
        for &leaf in &frontier {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(seed, EXPAND_STREAM, leaf.0 as u64));
            let out = expand_leaf(
                &mut tree,
                leaf,
                question,
                generator,
                constraints,
                config,
                &mut rng,
            )?;
            tokens += out.tokens;
            trace.generator_calls += out.generator_calls;
            trace.rejected_candidates += out.pruned_by_constraint;
            new_leaves.extend(out.produced);
        }

        let capacity = config.buffer_size.saturating_sub(pool_nodes.len());
        let scored: Vec<(NodeId, f64)> = new_leaves
            .iter()
            .map(|&id| Ok((id, tree.leaf_score(id)?)))
            .collect::<Result<_, TreeError>>()?;
        let mut prune_rng =
            ChaCha8Rng::seed_from_u64(derive_seed(seed, PRUNE_STREAM, depth as u64));
        let kept = prune_frontier(&scored, capacity, tau, &mut prune_rng);

        let mut pooled = 0;
        for &id in &new_leaves {
            if kept.binary_search(&id).is_err() {
                tree.set_status(id, NodeStatus::Pruned)?;
                continue;
            }
            let node = tree.node(id)?;
            if node.status == NodeStatus::Terminal || node.depth >= config.max_depth {
                pool_nodes.push(id);
                pooled += 1;
            } else {
                tree.frontier.push(id);
            }
        }

        trace.total_generated_tokens += tokens;
        trace.depths.push(DepthRecord {
            depth,
            temperature: tau,
            expanded: frontier.len(),
            frontier_before: new_leaves.len(),
            frontier_after: tree.frontier.len(),
            pooled,
            tokens,
        });
        depth += 1;
    }

    let mut pool = CandidatePool::new(PoolOrigin::Tree);
    for &id in &pool_nodes {
        pool.candidates.push(tree.chain_to(id)?);
    }
    Ok(SearchOutput {
        pool,
        pool_nodes,
        tree,
        trace,
    })
}

#[derive(Debug, Clone)]
pub struct EndToEndOutput {
    pub pool: CandidatePool,
    pub total_generated_tokens: usize,
    pub generator_calls: usize,
}

/// Samples `k` whole chains without a tree, splitting each into steps afterwards.
pub fn run_end_to_end(
    prompt: &str,
    generator: &dyn StepGenerator,
    config: &DecodeConfig,
    k: usize,
) -> Result<EndToEndOutput, SearchError> {
    config.validate()?;
    if k == 0 {
        return Err(ContractError::invalid("k", "must be >= 1").into());
    }
    let mut pool = CandidatePool::new(PoolOrigin::EndToEnd);
    let mut total = 0;
    for i in 0..k {
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(config.rng_seed, SAMPLE_STREAM, i as u64));
        let params = rotate_sampling_params(&config.token_sampling_schedule, i);
        let mut ctx = GenerationContext::new(prompt, params.clone(), config.max_end2end_tokens)
            .with_stop_markers(&END_TO_END_MARKERS);
        ctx.seed = Some(rng.next_u64());
        let generated =
            generator
                .generate_step(&ctx, &mut rng)
                .map_err(|cause| SearchError::Generation {
                    node: ReasoningTree::ROOT,
                    cause,
                })?;
        total += generated.tokens.len();
        let ended = generated.finish_reason == FinishReason::Eos;
        let pieces = split_into_steps(&generated.tokens);
        let n = pieces.len();
        let mut steps = Vec::with_capacity(n);
        for (j, toks) in pieces.into_iter().enumerate() {
            let step =
                ReasoningStep::from_tokens(toks, config.length_penalty, ended && j + 1 == n)?;
            let terminal = step.terminal;
            steps.push(step);
            if terminal {
                break;
            }
        }
        if !steps.is_empty() {
            pool.candidates.push(ReasoningChain::new(steps));
        }
    }
    Ok(EndToEndOutput {
        pool,
        total_generated_tokens: total,
        generator_calls: k,
    })
}
