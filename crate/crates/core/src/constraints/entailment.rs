//! Entailment providers and the contradiction check.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{ConstraintVerdict, ProviderError, Violation};
use crate::http::JsonTransport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntailmentLabel {
    Entailment,
    Neutral,
    Contradiction,
}

/// Label plus class scores in the order entailment, neutral, contradiction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entailment {
    pub label: EntailmentLabel,
    pub scores: [f64; 3],
}

impl Entailment {
    pub fn certain(label: EntailmentLabel) -> Self {
        let mut scores = [0.0; 3];
        scores[label as usize] = 1.0;
        Entailment { label, scores }
    }
}

pub trait EntailmentProvider: Send + Sync {
    fn name(&self) -> &str;

    fn classify(&self, premise: &str, hypothesis: &str) -> Result<Entailment, ProviderError>;
}

/// Always neutral; disables the contradiction check.
#[derive(Debug, Clone, Default)]
pub struct NeutralEntailment;

impl EntailmentProvider for NeutralEntailment {
    fn name(&self) -> &str {
        "neutral"
    }

    fn classify(&self, _premise: &str, _hypothesis: &str) -> Result<Entailment, ProviderError> {
        Ok(Entailment::certain(EntailmentLabel::Neutral))
    }
}

/// Compares `name = number` assignments: a variable the hypothesis assigns a different
/// value than the premise is a contradiction, a matching value is entailment.
#[derive(Debug, Clone, Default)]
pub struct RuleEntailment;

fn assignments(text: &str) -> Vec<(String, f64)> {
    let spaced = text.replace('=', " = ");
    let words: Vec<&str> = spaced
        .split_whitespace()
        .map(|w| w.trim_end_matches([',', '.', ';', ':']))
        .collect();
    words
        .windows(3)
        .filter(|w| w[1] == "=")
        .filter(|w| {
            let mut chars = w[0].chars();
            chars.next().is_some_and(char::is_alphabetic)
                && chars.all(|c| c.is_alphanumeric() || c == '_')
        })
        .filter_map(|w| w[2].parse::<f64>().ok().map(|v| (w[0].to_lowercase(), v)))
        .collect()
}

impl EntailmentProvider for RuleEntailment {
    fn name(&self) -> &str {
        "rule"
    }

    fn classify(&self, premise: &str, hypothesis: &str) -> Result<Entailment, ProviderError> {
        let known: HashMap<String, f64> = assignments(premise).into_iter().collect();
        let mut agrees = false;
        for (var, value) in assignments(hypothesis) {
            match known.get(&var) {
                Some(v) if *v != value => {
                    return Ok(Entailment::certain(EntailmentLabel::Contradiction))
                }
                Some(_) => agrees = true,
                None => {}
            }
        }
        Ok(Entailment::certain(if agrees {
            EntailmentLabel::Entailment
        } else {
            EntailmentLabel::Neutral
        }))
    }
}

/// NLI service: `{"premise", "hypothesis"}` -> `{"label", "scores"}` where scores is
/// `[entailment, neutral, contradiction]` or an object keyed by label.
pub struct HttpEntailment {
    transport: Box<dyn JsonTransport>,
}

impl HttpEntailment {
    pub fn new(transport: Box<dyn JsonTransport>) -> Self {
        HttpEntailment { transport }
    }
}

impl EntailmentProvider for HttpEntailment {
    fn name(&self) -> &str {
        "http-nli"
    }

    fn classify(&self, premise: &str, hypothesis: &str) -> Result<Entailment, ProviderError> {
        let resp = self
            .transport
            .post(&json!({ "premise": premise, "hypothesis": hypothesis }))?;
        let label: EntailmentLabel = resp
            .get("label")
            .cloned()
            .map(serde_json::from_value)
            .transpose()
            .map_err(|e| ProviderError::Malformed(format!("label: {e}")))?
            .ok_or_else(|| ProviderError::Malformed("response lacks label".into()))?;
        let scores = match resp.get("scores") {
            Some(v) if v.is_array() => serde_json::from_value::<[f64; 3]>(v.clone())
                .map_err(|e| ProviderError::Malformed(format!("scores: {e}")))?,
            Some(v) if v.is_object() => {
                let get = |k: &str| v.get(k).and_then(|x| x.as_f64()).unwrap_or(0.0);
                [get("entailment"), get("neutral"), get("contradiction")]
            }
            _ => return Err(ProviderError::Malformed("response lacks scores".into())),
        };
        let sum: f64 = scores.iter().sum();
        if scores.iter().any(|s| !(0.0..=1.0).contains(s)) || (sum - 1.0).abs() > 1e-6 {
            return Err(ProviderError::Malformed(format!(
                "scores {scores:?} are not a distribution"
            )));
        }
        Ok(Entailment { label, scores })
    }
}

pub fn check_contradiction(
    context_text: &str,
    step_text: &str,
    provider: &dyn EntailmentProvider,
) -> Result<ConstraintVerdict, ProviderError> {
    let e = provider.classify(context_text, step_text)?;
    if e.label == EntailmentLabel::Contradiction {
        Ok(ConstraintVerdict::fail(
            Violation::Contradiction,
            format!("contradiction score {:.3}", e.scores[2]),
        ))
    } else {
        Ok(ConstraintVerdict::pass())
    }
}
