pub mod cli;
pub mod constraints;
pub mod generation;
pub mod harness;
pub mod http;
pub mod registry;
pub mod scoring;
pub mod search;
pub mod selection;
pub mod types;

pub use scoring::{anneal_temperature, score_step, step_selection_distribution};
pub use types::{
    CandidatePool, DecodeConfig, NodeId, NodeStatus, PoolOrigin, ReasoningChain, ReasoningStep,
    ReasoningTree, Token, TokenSamplingParams, TreeNode,
};
