//! A seeded toy language model with exact, analytically known probabilities.
//!
//! The model is a weighted grammar over whitespace tokens. Each state offers productions
//! `(emission, next state, probability)`; picking a production emits its tokens, the
//! first one carrying the production's log-probability and the rest carrying 0. The
//! log-probability of a path is therefore exactly the sum of its token log-probabilities.
//!
//! The model is stateless between calls: the grammar position is recovered by replaying
//! the prior steps of the context through the grammar.

use std::collections::{BTreeMap, VecDeque};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::sampling::sample_index;
use super::{
    hits_stop_marker, FinishReason, GeneratedStep, GenerationContext, GenerationError,
    StepGenerator,
};
use crate::types::Token;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Production {
    pub emit: String,
    /// `None` ends the sequence.
    pub next: Option<String>,
    pub probability: f64,
}

impl Production {
    pub fn new(emit: impl Into<String>, next: Option<&str>, probability: f64) -> Self {
        Production {
            emit: emit.into(),
            next: next.map(str::to_string),
            probability,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ToyLmSpec {
    pub states: BTreeMap<String, Vec<Production>>,
    /// Question text to start state. A prompt selects the longest question it contains.
    pub starts: BTreeMap<String, String>,
    /// Problem id to gold answer.
    #[serde(default)]
    pub answer_table: BTreeMap<String, String>,
    #[serde(default)]
    pub seed: u64,
}

impl ToyLmSpec {
    pub fn validate(&self) -> Result<(), GenerationError> {
        for (name, prods) in &self.states {
            if prods.is_empty() {
                return Err(toy_err(format!("state {name} has no productions")));
            }
            let total: f64 = prods.iter().map(|p| p.probability).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(toy_err(format!(
                    "state {name}: production probabilities sum to {total}"
                )));
            }
            for p in prods {
                if !(p.probability > 0.0 && p.probability <= 1.0) {
                    return Err(toy_err(format!(
                        "state {name}: probability {} out of range",
                        p.probability
                    )));
                }
                if p.emit.split_whitespace().next().is_none() {
                    return Err(toy_err(format!("state {name}: empty emission")));
                }
                if let Some(next) = &p.next {
                    if !self.states.contains_key(next) {
                        return Err(toy_err(format!("state {name}: unknown next state {next}")));
                    }
                }
            }
        }
        for (q, s) in &self.starts {
            if !self.states.contains_key(s) {
                return Err(toy_err(format!("start state {s} for {q:?} is missing")));
            }
        }
        Ok(())
    }

    /// Merges another spec in; state names must not collide.
    pub fn merge(&mut self, other: ToyLmSpec) -> Result<(), GenerationError> {
        for (k, v) in other.states {
            if self.states.insert(k.clone(), v).is_some() {
                return Err(toy_err(format!("duplicate state {k}")));
            }
        }
        self.starts.extend(other.starts);
        self.answer_table.extend(other.answer_table);
        Ok(())
    }
}

fn toy_err(msg: impl Into<String>) -> GenerationError {
    GenerationError::Toy(msg.into())
}

#[derive(Debug)]
struct Cursor<'a> {
    state: Option<&'a str>,
    pending: VecDeque<&'a str>,
}

#[derive(Debug, Clone)]
pub struct ToyLm {
    spec: ToyLmSpec,
    name: String,
}

impl ToyLm {
    pub fn new(spec: ToyLmSpec) -> Result<Self, GenerationError> {
        spec.validate()?;
        Ok(ToyLm {
            spec,
            name: "toy".to_string(),
        })
    }

    pub fn spec(&self) -> &ToyLmSpec {
        &self.spec
    }

    fn start_state(&self, prompt: &str) -> Result<&str, GenerationError> {
        self.spec
            .starts
            .iter()
            .filter(|(q, _)| prompt.contains(q.as_str()))
            .max_by_key(|(q, _)| q.len())
            .map(|(_, s)| s.as_str())
            .ok_or_else(|| toy_err("no toy problem matches the prompt"))
    }

    fn productions(&self, state: &str) -> Result<&[Production], GenerationError> {
        self.spec
            .states
            .get(state)
            .map(Vec::as_slice)
            .ok_or_else(|| toy_err(format!("state {state} is missing")))
    }

    fn replay<'a>(
        &'a self,
        start: &'a str,
        prior: &[String],
    ) -> Result<Cursor<'a>, GenerationError> {
        let joined = prior.join(" ");
        let stream: Vec<&str> = joined.split_whitespace().collect();
        let mut cur = Cursor {
            state: Some(start),
            pending: VecDeque::new(),
        };
        let mut i = 0;
        while i < stream.len() {
            if let Some(expected) = cur.pending.pop_front() {
                if expected != stream[i] {
                    return Err(toy_err(format!(
                        "prior text diverges from the grammar at {:?}",
                        stream[i]
                    )));
                }
                i += 1;
                continue;
            }
            let state = cur
                .state
                .ok_or_else(|| toy_err("prior text continues past end of sequence"))?;
            let rest = &stream[i..];
            let prod = self
                .productions(state)?
                .iter()
                .find(|p| {
                    p.emit
                        .split_whitespace()
                        .zip(rest.iter())
                        .all(|(a, b)| a == *b)
                })
                .ok_or_else(|| {
                    toy_err(format!("no production of {state} matches {:?}", rest[0]))
                })?;
            cur.pending = prod.emit.split_whitespace().collect();
            cur.state = prod.next.as_deref();
        }
        Ok(cur)
    }

    /// Probability of following `emissions` production by production from the start of `question`.
    pub fn path_probability(&self, question: &str, emissions: &[&str]) -> Option<f64> {
        let mut state = Some(self.start_state(question).ok()?);
        let mut prob = 1.0;
        for e in emissions {
            let prods = self.productions(state?).ok()?;
            let p = prods.iter().find(|p| p.emit == *e)?;
            prob *= p.probability;
            state = p.next.as_deref();
        }
        Some(prob)
    }
}

impl StepGenerator for ToyLm {
    fn name(&self) -> &str {
        &self.name
    }

    fn generate_step(
        &self,
        context: &GenerationContext,
        rng: &mut dyn RngCore,
    ) -> Result<GeneratedStep, GenerationError> {
        context.validate()?;
        let start = self.start_state(&context.prompt)?;
        let mut cur = self.replay(start, &context.prior_steps)?;
        let mut tokens: Vec<Token> = Vec::new();
        let mut text = String::new();
        let finish = loop {
            if tokens.len() >= context.max_tokens {
                break FinishReason::Length;
            }
            let (word, logprob) = if let Some(w) = cur.pending.pop_front() {
                (w, 0.0)
            } else {
                let Some(state) = cur.state else {
                    break FinishReason::Eos;
                };
                let prods = self.productions(state)?;
                let probs: Vec<f64> = prods.iter().map(|p| p.probability).collect();
                let (idx, lp) = sample_index(&probs, &context.params, rng).ok_or_else(|| {
                    toy_err(format!("state {state} has no sampleable production"))
                })?;
                let prod = &prods[idx];
                let mut words = prod.emit.split_whitespace();
                let first = words.next().expect("validated non-empty emission");
                cur.pending = words.collect();
                cur.state = prod.next.as_deref();
                (first, lp.min(0.0))
            };
            let piece = if tokens.is_empty() {
                word.to_string()
            } else {
                format!(" {word}")
            };
            text.push_str(&piece);
            tokens.push(Token::new(piece, logprob)?);
            if hits_stop_marker(&text, &context.stop_markers) {
                break FinishReason::StopMarker;
            }
        };
        Ok(GeneratedStep {
            tokens,
            finish_reason: finish,
        })
    }
}
