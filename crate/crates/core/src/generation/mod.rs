//! The step generator contract and its backends.
//!
//! A generator produces one reasoning step per call: tokens are drawn until a stop
//! marker, end of sequence, or the token budget. Backends are the seeded toy model in
//! [`toy`] and the completion-server client in [`remote`].

pub mod remote;
pub mod sampling;
pub mod toy;
pub mod toytask;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{ContractError, Token, TokenSamplingParams};

/// Step delimiters: a newline or a sentence-ending period followed by a space.
pub const DEFAULT_STEP_MARKERS: [&str; 2] = ["\n", ". "];

/// Markers used when a whole chain is generated in one call.
pub const END_TO_END_MARKERS: [&str; 2] = ["\n\n", "\nQ:"];

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationContext {
    pub prompt: String,
    pub prior_steps: Vec<String>,
    pub params: TokenSamplingParams,
    pub max_tokens: usize,
    pub stop_markers: Vec<String>,
    /// Optional seed forwarded to remote servers.
    pub seed: Option<u64>,
}

impl GenerationContext {
    pub fn new(prompt: impl Into<String>, params: TokenSamplingParams, max_tokens: usize) -> Self {
        GenerationContext {
            prompt: prompt.into(),
            prior_steps: Vec::new(),
            params,
            max_tokens,
            stop_markers: DEFAULT_STEP_MARKERS.iter().map(|s| s.to_string()).collect(),
            seed: None,
        }
    }

    pub fn with_prior_steps(mut self, steps: Vec<String>) -> Self {
        self.prior_steps = steps;
        self
    }

    pub fn with_stop_markers(mut self, markers: &[&str]) -> Self {
        self.stop_markers = markers.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn validate(&self) -> Result<(), ContractError> {
        if self.max_tokens == 0 {
            return Err(ContractError::invalid("max_tokens", "must be >= 1"));
        }
        if self.stop_markers.is_empty() {
            return Err(ContractError::Empty("stop_markers"));
        }
        self.params.validate()
    }

    /// Prompt followed by the prior steps, the text a completion server continues.
    pub fn full_prompt(&self) -> String {
        if self.prior_steps.is_empty() {
            self.prompt.clone()
        } else {
            format!("{} {}", self.prompt, self.prior_steps.join(" "))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinishReason {
    StopMarker,
    Eos,
    Length,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedStep {
    pub tokens: Vec<Token>,
    pub finish_reason: FinishReason,
}

impl GeneratedStep {
    pub fn text(&self) -> String {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }
}

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("invalid generation context: {0}")]
    Contract(#[from] ContractError),
    #[error("toy model: {0}")]
    Toy(String),
    /// Transport-level failure that may succeed on retry.
    #[error("network error after {attempts} attempt(s): {detail}")]
    Network { attempts: usize, detail: String },
    /// The server answered but broke the wire protocol.
    #[error("protocol error: {0}")]
    Protocol(String),
}

impl GenerationError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, GenerationError::Network { .. })
    }
}

/// A token-level language model exposed one reasoning step at a time.
pub trait StepGenerator: Send + Sync {
    fn name(&self) -> &str;

    fn generate_step(
        &self,
        context: &GenerationContext,
        rng: &mut dyn RngCore,
    ) -> Result<GeneratedStep, GenerationError>;
}

/// Round-robin pick from the sampling schedule; this is what diversifies sibling branches.
pub fn rotate_sampling_params(
    schedule: &[TokenSamplingParams],
    branch_index: usize,
) -> &TokenSamplingParams {
    assert!(!schedule.is_empty(), "sampling schedule must be non-empty");
    &schedule[branch_index % schedule.len()]
}

/// True when `text` followed by a token separator contains one of `markers`.
pub(crate) fn hits_stop_marker(text: &str, markers: &[String]) -> bool {
    if markers
        .iter()
        .any(|m| !m.is_empty() && text.contains(m.as_str()))
    {
        return true;
    }
    let lookahead = format!("{text} ");
    markers
        .iter()
        .any(|m| !m.is_empty() && lookahead.ends_with(m.as_str()))
}

/// Splits a whole generated chain into step-sized token runs.
///
/// A step ends after a token containing a newline, or after a token ending in "." that is
/// followed by whitespace (or by nothing).
pub fn split_into_steps(tokens: &[Token]) -> Vec<Vec<Token>> {
    let mut steps = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        current.push(tok.clone());
        let next_starts_ws = tokens
            .get(i + 1)
            .is_none_or(|n| n.text.starts_with(char::is_whitespace));
        let boundary =
            tok.text.contains('\n') || (tok.text.trim_end().ends_with('.') && next_starts_ws);
        if boundary {
            steps.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        steps.push(current);
    }
    steps.retain(|s| s.iter().any(|t| !t.text.trim().is_empty()));
    steps
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: f64) -> TokenSamplingParams {
        TokenSamplingParams {
            temperature: t,
            top_k: Some(40),
            top_p: None,
        }
    }

    #[test]
    fn rotation_is_round_robin() {
        let sched = vec![p(0.0), p(1.0), p(2.0)];
        assert_eq!(rotate_sampling_params(&sched, 4), &sched[1]);
        let single = vec![p(0.5)];
        for b in 0..5 {
            assert_eq!(rotate_sampling_params(&single, b), &single[0]);
        }
        let two = vec![p(0.0), p(1.0)];
        let picked: Vec<f64> = (0..4)
            .map(|b| rotate_sampling_params(&two, b).temperature)
            .collect();
        assert_eq!(picked, vec![0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn stop_marker_detection() {
        let markers: Vec<String> = DEFAULT_STEP_MARKERS.iter().map(|s| s.to_string()).collect();
        assert!(hits_stop_marker("x=2 .", &markers));
        assert!(hits_stop_marker("so 3 + 2 = 5.", &markers));
        assert!(!hits_stop_marker("the value 0.5", &markers));
        assert!(hits_stop_marker("line\n", &markers));
    }

    #[test]
    fn split_on_sentence_boundaries() {
        let toks: Vec<Token> = [
            "There", " are", " 3.", " So", " 3.5", " total.", " The", " answer", " is", " 3.",
        ]
        .iter()
        .map(|t| Token::new(*t, -0.1).unwrap())
        .collect();
        let steps = split_into_steps(&toks);
        let texts: Vec<String> = steps
            .iter()
            .map(|s| s.iter().map(|t| t.text.as_str()).collect::<String>())
            .collect();
        assert_eq!(
            texts,
            vec!["There are 3.", " So 3.5 total.", " The answer is 3."]
        );
    }

    #[test]
    fn context_validation() {
        let mut ctx = GenerationContext::new("q", p(1.0), 8);
        ctx.validate().unwrap();
        ctx.stop_markers.clear();
        assert!(ctx.validate().is_err());
    }
}
