//! Step constraints: a candidate step is regenerated when it repeats the question or an
//! earlier step, or when an entailment model says it contradicts them.

pub mod entailment;
pub mod similarity;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::http::HttpError;

pub use entailment::{
    check_contradiction, Entailment, EntailmentLabel, EntailmentProvider, HttpEntailment,
    NeutralEntailment, RuleEntailment,
};
pub use similarity::{
    check_repetition, cosine_similarity, HttpSimilarity, LexicalSimilarity, SimilarityProvider,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProviderError {
    #[error(transparent)]
    Transport(#[from] HttpError),
    #[error("malformed provider response: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    Repetition,
    Contradiction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintVerdict {
    pub passed: bool,
    pub violation: Option<Violation>,
    pub detail: String,
}

impl ConstraintVerdict {
    pub fn pass() -> Self {
        ConstraintVerdict {
            passed: true,
            violation: None,
            detail: String::new(),
        }
    }

    pub fn fail(violation: Violation, detail: impl Into<String>) -> Self {
        ConstraintVerdict {
            passed: false,
            violation: Some(violation),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateDecision {
    Accept,
    Regenerate,
    Prune,
}

/// Accept a passing step; otherwise regenerate while `attempt < max_attempts`, then prune.
pub fn gate_decision(passed: bool, attempt: usize, max_attempts: usize) -> GateDecision {
    if passed {
        GateDecision::Accept
    } else if attempt < max_attempts {
        GateDecision::Regenerate
    } else {
        GateDecision::Prune
    }
}

/// What a failing provider means for the candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailPolicy {
    /// Treat the check as passed.
    #[default]
    Open,
    /// Treat the check as violated.
    Closed,
}

pub struct ConstraintSet {
    pub similarity: Box<dyn SimilarityProvider>,
    pub entailment: Box<dyn EntailmentProvider>,
    pub repetition_threshold: f64,
    pub fail_policy: FailPolicy,
}

impl Default for ConstraintSet {
    fn default() -> Self {
        ConstraintSet {
            similarity: Box::new(LexicalSimilarity),
            entailment: Box::new(RuleEntailment),
            repetition_threshold: 0.9,
            fail_policy: FailPolicy::Open,
        }
    }
}

impl ConstraintSet {
    pub fn new(
        similarity: Box<dyn SimilarityProvider>,
        entailment: Box<dyn EntailmentProvider>,
    ) -> Self {
        ConstraintSet {
            similarity,
            entailment,
            ..ConstraintSet::default()
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.repetition_threshold = threshold;
        self
    }

    pub fn with_fail_policy(mut self, policy: FailPolicy) -> Self {
        self.fail_policy = policy;
        self
    }

    fn resolve(
        &self,
        result: Result<ConstraintVerdict, ProviderError>,
        violation: Violation,
    ) -> ConstraintVerdict {
        match (result, self.fail_policy) {
            (Ok(v), _) => v,
            (Err(e), FailPolicy::Open) => ConstraintVerdict {
                passed: true,
                violation: None,
                detail: format!("provider failed, treated as passed: {e}"),
            },
            (Err(e), FailPolicy::Closed) => {
                ConstraintVerdict::fail(violation, format!("provider failed: {e}"))
            }
        }
    }

    /// Runs both checks. `question` and `ancestors` (oldest first) form the context.
    pub fn check(&self, step_text: &str, question: &str, ancestors: &[&str]) -> ConstraintVerdict {
        let mut context: Vec<&str> = Vec::with_capacity(ancestors.len() + 1);
        if !question.trim().is_empty() {
            context.push(question);
        }
        context.extend_from_slice(ancestors);
        let rep = self.resolve(
            check_repetition(
                step_text,
                &context,
                self.similarity.as_ref(),
                self.repetition_threshold,
            ),
            Violation::Repetition,
        );
        if !rep.passed {
            return rep;
        }
        let premise = context.join("\n");
        if premise.trim().is_empty() {
            return rep;
        }
        self.resolve(
            check_contradiction(&premise, step_text, self.entailment.as_ref()),
            Violation::Contradiction,
        )
    }

    /// Checks a candidate and decides what the search does with it.
    pub fn gate_step(
        &self,
        step_text: &str,
        question: &str,
        ancestors: &[&str],
        attempt: usize,
        max_attempts: usize,
    ) -> (GateDecision, ConstraintVerdict) {
        let verdict = self.check(step_text, question, ancestors);
        (
            gate_decision(verdict.passed, attempt, max_attempts),
            verdict,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Broken;

    impl SimilarityProvider for Broken {
        fn name(&self) -> &str {
            "broken"
        }
        fn embed(&self, _: &[&str]) -> Result<Vec<Vec<f64>>, ProviderError> {
            Err(ProviderError::Transport(HttpError::Network("down".into())))
        }
    }

    #[test]
    fn gate_examples() {
        assert_eq!(gate_decision(true, 0, 2), GateDecision::Accept);
        assert_eq!(gate_decision(false, 0, 2), GateDecision::Regenerate);
        assert_eq!(gate_decision(false, 1, 2), GateDecision::Regenerate);
        assert_eq!(gate_decision(false, 2, 2), GateDecision::Prune);
        assert_eq!(gate_decision(false, 0, 0), GateDecision::Prune);
    }

    #[test]
    fn gate_never_regenerates_past_budget() {
        for n in 0..5 {
            for attempt in n..n + 5 {
                assert_ne!(gate_decision(false, attempt, n), GateDecision::Regenerate);
            }
        }
    }

    #[test]
    fn combined_check_order() {
        let set = ConstraintSet::default();
        let (d, v) = set.gate_step("x = 4", "Q: what is x?", &["x = 4"], 0, 2);
        assert_eq!(
            (d, v.violation),
            (GateDecision::Regenerate, Some(Violation::Repetition))
        );
        let (d, v) = set.gate_step("so x = 5 now", "Q: what is x?", &["we have x = 4"], 2, 2);
        assert_eq!(
            (d, v.violation),
            (GateDecision::Prune, Some(Violation::Contradiction))
        );
        let (d, _) = set.gate_step("so y = 5 now", "Q: what is x?", &["we have x = 4"], 0, 2);
        assert_eq!(d, GateDecision::Accept);
    }

    #[test]
    fn fail_policy() {
        let open = ConstraintSet::new(Box::new(Broken), Box::new(NeutralEntailment));
        let v = open.check("a", "q", &["b"]);
        assert!(v.passed);
        let closed = open.with_fail_policy(FailPolicy::Closed);
        let v = closed.check("a", "q", &["b"]);
        assert_eq!(v.violation, Some(Violation::Repetition));
    }
}
