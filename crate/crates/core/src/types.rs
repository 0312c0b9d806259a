//! Domain types shared by generation, search, selection and the harness.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scoring::score_step;

/// Marker that closes a reasoning chain, e.g. "The answer is 6."
pub const ANSWER_MARKER: &str = "The answer is";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContractError {
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid value for {name}: {detail}")]
    Invalid { name: &'static str, detail: String },
}

impl ContractError {
    pub(crate) fn invalid(name: &'static str, detail: impl Into<String>) -> Self {
        ContractError::Invalid {
            name,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    /// Natural-log probability of the token under the sampling distribution.
    pub logprob: f64,
}

impl Token {
    pub fn new(text: impl Into<String>, logprob: f64) -> Result<Self, ContractError> {
        let text = text.into();
        if text.is_empty() {
            return Err(ContractError::Empty("token text"));
        }
        if !logprob.is_finite() || logprob > 0.0 {
            return Err(ContractError::invalid(
                "logprob",
                format!("{logprob} is not a finite value <= 0"),
            ));
        }
        Ok(Token { text, logprob })
    }
}

/// One sentence-level unit of a chain, scored with the length-normalized log-likelihood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasoningStep {
    pub tokens: Vec<Token>,
    pub text: String,
    pub score: f64,
    pub terminal: bool,
}

impl ReasoningStep {
    /// Builds a step from generated tokens. `text` is the trimmed concatenation of the
    /// token texts. The step is terminal if it carries the answer marker or `ended` is set.
    pub fn from_tokens(
        tokens: Vec<Token>,
        length_penalty: f64,
        ended: bool,
    ) -> Result<Self, ContractError> {
        let logprobs: Vec<f64> = tokens.iter().map(|t| t.logprob).collect();
        let score = score_step(&logprobs, length_penalty)?;
        let text: String = tokens.iter().map(|t| t.text.as_str()).collect();
        let text = text.trim().to_string();
        if text.is_empty() {
            return Err(ContractError::Empty("step text"));
        }
        let terminal = ended || text.contains(ANSWER_MARKER);
        Ok(ReasoningStep {
            tokens,
            text,
            score,
            terminal,
        })
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasoningChain {
    pub steps: Vec<ReasoningStep>,
    #[serde(default)]
    pub answer: Option<String>,
}

impl ReasoningChain {
    pub fn new(steps: Vec<ReasoningStep>) -> Self {
        ReasoningChain {
            steps,
            answer: None,
        }
    }

    /// Full chain text, steps separated by single spaces.
    pub fn text(&self) -> String {
        self.steps
            .iter()
            .map(|s| s.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn last_step(&self) -> Option<&ReasoningStep> {
        self.steps.last()
    }

    pub fn token_count(&self) -> usize {
        self.steps.iter().map(ReasoningStep::token_count).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeStatus {
    Active,
    Pruned,
    Terminal,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    /// `None` only for the root, which stands for the prompt.
    pub step: Option<ReasoningStep>,
    pub depth: usize,
    pub status: NodeStatus,
    pub children: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenSamplingParams {
    pub temperature: f64,
    #[serde(default)]
    pub top_k: Option<usize>,
    #[serde(default)]
    pub top_p: Option<f64>,
}

impl TokenSamplingParams {
    pub fn greedy() -> Self {
        TokenSamplingParams {
            temperature: 0.0,
            top_k: Some(1),
            top_p: None,
        }
    }

    /// temperature 0 and top_k = 1 both select the modal token.
    pub fn is_greedy(&self) -> bool {
        self.temperature == 0.0 || self.top_k == Some(1)
    }

    pub fn validate(&self) -> Result<(), ContractError> {
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(ContractError::invalid(
                "temperature",
                format!("{} must be finite and >= 0", self.temperature),
            ));
        }
        if self.top_k.is_none() && self.top_p.is_none() {
            return Err(ContractError::invalid(
                "sampling params",
                "at least one of top_k/top_p must be set",
            ));
        }
        if self.top_k == Some(0) {
            return Err(ContractError::invalid("top_k", "must be >= 1"));
        }
        if let Some(p) = self.top_p {
            if !(p > 0.0 && p <= 1.0) {
                return Err(ContractError::invalid(
                    "top_p",
                    format!("{p} not in (0, 1]"),
                ));
            }
        }
        Ok(())
    }
}

impl Default for TokenSamplingParams {
    fn default() -> Self {
        TokenSamplingParams {
            temperature: 1.0,
            top_k: Some(40),
            top_p: Some(0.5),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeConfig {
    pub branching_factor: usize,
    pub buffer_size: usize,
    pub length_penalty: f64,
    pub step_temperature: f64,
    pub annealing_factor: f64,
    pub max_regeneration_attempts: usize,
    pub max_depth: usize,
    pub max_step_tokens: usize,
    pub max_end2end_tokens: usize,
    pub repetition_threshold: f64,
    pub token_sampling_schedule: Vec<TokenSamplingParams>,
    pub rng_seed: u64,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            branching_factor: 4,
            buffer_size: 8,
            length_penalty: 1.0,
            step_temperature: 1.0,
            annealing_factor: 0.5,
            max_regeneration_attempts: 2,
            max_depth: 16,
            max_step_tokens: 128,
            max_end2end_tokens: 512,
            repetition_threshold: 0.9,
            token_sampling_schedule: vec![TokenSamplingParams::default()],
            rng_seed: 0,
        }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<(), ContractError> {
        let positive = [
            ("branching_factor", self.branching_factor),
            ("buffer_size", self.buffer_size),
            ("max_depth", self.max_depth),
            ("max_step_tokens", self.max_step_tokens),
            ("max_end2end_tokens", self.max_end2end_tokens),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(ContractError::invalid(name, "must be >= 1"));
            }
        }
        if !self.length_penalty.is_finite() {
            return Err(ContractError::invalid("length_penalty", "must be finite"));
        }
        if !(self.step_temperature.is_finite() && self.step_temperature > 0.0) {
            return Err(ContractError::invalid(
                "step_temperature",
                format!("{} must be > 0", self.step_temperature),
            ));
        }
        if !(self.annealing_factor > 0.0 && self.annealing_factor <= 1.0) {
            return Err(ContractError::invalid(
                "annealing_factor",
                format!("{} not in (0, 1]", self.annealing_factor),
            ));
        }
        if !(0.0..=1.0).contains(&self.repetition_threshold) {
            return Err(ContractError::invalid(
                "repetition_threshold",
                format!("{} not in [0, 1]", self.repetition_threshold),
            ));
        }
        if self.token_sampling_schedule.is_empty() {
            return Err(ContractError::Empty("token_sampling_schedule"));
        }
        for p in &self.token_sampling_schedule {
            p.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolOrigin {
    Tree,
    EndToEnd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePool {
    pub candidates: Vec<ReasoningChain>,
    pub origin: PoolOrigin,
}

impl CandidatePool {
    pub fn new(origin: PoolOrigin) -> Self {
        CandidatePool {
            candidates: Vec::new(),
            origin,
        }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} is {1:?} and cannot take children")]
    Closed(NodeId, NodeStatus),
    #[error("node {0} already has {1} children (branching factor)")]
    Full(NodeId, usize),
}

/// The search tree. Node ids are indices into `nodes`; the root is always `NodeId(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasoningTree {
    pub prompt: String,
    pub nodes: Vec<TreeNode>,
    pub frontier: Vec<NodeId>,
    pub config_snapshot: DecodeConfig,
    pub rng_seed: u64,
}

impl ReasoningTree {
    pub const ROOT: NodeId = NodeId(0);

    pub fn new(prompt: impl Into<String>, config: DecodeConfig) -> Self {
        let root = TreeNode {
            id: Self::ROOT,
            parent: None,
            step: None,
            depth: 0,
            status: NodeStatus::Active,
            children: Vec::new(),
        };
        ReasoningTree {
            prompt: prompt.into(),
            nodes: vec![root],
            frontier: vec![Self::ROOT],
            rng_seed: config.rng_seed,
            config_snapshot: config,
        }
    }

    pub fn node(&self, id: NodeId) -> Result<&TreeNode, TreeError> {
        self.nodes.get(id.0).ok_or(TreeError::UnknownNode(id))
    }

    pub fn node_mut(&mut self, id: NodeId) -> Result<&mut TreeNode, TreeError> {
        self.nodes.get_mut(id.0).ok_or(TreeError::UnknownNode(id))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn add_child(&mut self, parent: NodeId, step: ReasoningStep) -> Result<NodeId, TreeError> {
        let limit = self.config_snapshot.branching_factor;
        let id = NodeId(self.nodes.len());
        let p = self.node_mut(parent)?;
        if matches!(p.status, NodeStatus::Pruned | NodeStatus::Exhausted) {
            return Err(TreeError::Closed(parent, p.status));
        }
        if p.children.len() >= limit {
            return Err(TreeError::Full(parent, limit));
        }
        p.children.push(id);
        let depth = p.depth + 1;
        let status = if step.terminal {
            NodeStatus::Terminal
        } else {
            NodeStatus::Active
        };
        self.nodes.push(TreeNode {
            id,
            parent: Some(parent),
            step: Some(step),
            depth,
            status,
            children: Vec::new(),
        });
        Ok(id)
    }

    pub fn set_status(&mut self, id: NodeId, status: NodeStatus) -> Result<(), TreeError> {
        self.node_mut(id)?.status = status;
        Ok(())
    }

    /// Ancestor ids from the first generated step down to `id` (root excluded).
    pub fn path(&self, id: NodeId) -> Result<Vec<NodeId>, TreeError> {
        let mut out = Vec::new();
        let mut cur = Some(id);
        while let Some(c) = cur {
            let node = self.node(c)?;
            if node.parent.is_some() {
                out.push(c);
            }
            cur = node.parent;
        }
        out.reverse();
        Ok(out)
    }

    pub fn path_steps(&self, id: NodeId) -> Result<Vec<&ReasoningStep>, TreeError> {
        self.path(id)?
            .into_iter()
            .map(|n| {
                Ok(self
                    .node(n)?
                    .step
                    .as_ref()
                    .expect("non-root node has a step"))
            })
            .collect()
    }

    pub fn chain_to(&self, id: NodeId) -> Result<ReasoningChain, TreeError> {
        let steps = self.path_steps(id)?.into_iter().cloned().collect();
        Ok(ReasoningChain::new(steps))
    }

    pub fn leaf_score(&self, id: NodeId) -> Result<f64, TreeError> {
        Ok(self.node(id)?.step.as_ref().map_or(0.0, |s| s.score))
    }
}
