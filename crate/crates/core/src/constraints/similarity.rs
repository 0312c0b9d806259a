//! Sentence similarity providers and the repetition check.

use std::collections::HashMap;

use serde_json::json;

use super::{ConstraintVerdict, ProviderError, Violation};
use crate::http::JsonTransport;
use crate::types::ContractError;

/// Embeds a batch of texts. Vectors are only comparable within one call.
pub trait SimilarityProvider: Send + Sync {
    fn name(&self) -> &str;

    fn embed(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, ProviderError>;
}

pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64, ContractError> {
    if u.len() != v.len() {
        return Err(ContractError::invalid(
            "vectors",
            format!("dimension mismatch {} vs {}", u.len(), v.len()),
        ));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(ContractError::invalid(
            "vectors",
            "zero vector has no direction",
        ));
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Term-frequency vectors over lowercased whitespace tokens.
#[derive(Debug, Clone, Default)]
pub struct LexicalSimilarity;

impl SimilarityProvider for LexicalSimilarity {
    fn name(&self) -> &str {
        "lexical"
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, ProviderError> {
        let mut vocab: HashMap<String, usize> = HashMap::new();
        let tokenized: Vec<Vec<usize>> = texts
            .iter()
            .map(|t| {
                t.split_whitespace()
                    .map(|w| {
                        let next = vocab.len();
                        *vocab.entry(w.to_lowercase()).or_insert(next)
                    })
                    .collect()
            })
            .collect();
        Ok(tokenized
            .into_iter()
            .map(|ids| {
                let mut v = vec![0.0; vocab.len()];
                for i in ids {
                    v[i] += 1.0;
                }
                v
            })
            .collect())
    }
}

/// Embedding service: `{"texts": [..]}` -> `{"vectors": [[..], ..]}`.
pub struct HttpSimilarity {
    transport: Box<dyn JsonTransport>,
}

impl HttpSimilarity {
    pub fn new(transport: Box<dyn JsonTransport>) -> Self {
        HttpSimilarity { transport }
    }
}

impl SimilarityProvider for HttpSimilarity {
    fn name(&self) -> &str {
        "http-embedding"
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, ProviderError> {
        let resp = self.transport.post(&json!({ "texts": texts }))?;
        let vectors: Vec<Vec<f64>> = resp
            .get("vectors")
            .cloned()
            .map(serde_json::from_value)
            .transpose()
            .map_err(|e| ProviderError::Malformed(format!("vectors: {e}")))?
            .ok_or_else(|| ProviderError::Malformed("response lacks vectors".into()))?;
        if vectors.len() != texts.len() {
            return Err(ProviderError::Malformed(format!(
                "{} vectors for {} texts",
                vectors.len(),
                texts.len()
            )));
        }
        Ok(vectors)
    }
}

/// Largest cosine similarity between `step` and each of `others`, with its index.
/// Texts whose vector is zero are skipped.
pub fn max_similarity(
    provider: &dyn SimilarityProvider,
    step: &str,
    others: &[&str],
) -> Result<Option<(usize, f64)>, ProviderError> {
    if others.is_empty() {
        return Ok(None);
    }
    let mut batch = Vec::with_capacity(others.len() + 1);
    batch.push(step);
    batch.extend_from_slice(others);
    let vecs = provider.embed(&batch)?;
    if vecs.len() != batch.len() {
        return Err(ProviderError::Malformed("embedding count mismatch".into()));
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in vecs[1..].iter().enumerate() {
        let Ok(sim) = cosine_similarity(&vecs[0], v) else {
            continue;
        };
        if best.is_none_or(|(_, b)| sim > b) {
            best = Some((i, sim));
        }
    }
    Ok(best)
}

/// Rejects `step_text` when its similarity to any context text exceeds `threshold`.
pub fn check_repetition(
    step_text: &str,
    context_texts: &[&str],
    provider: &dyn SimilarityProvider,
    threshold: f64,
) -> Result<ConstraintVerdict, ProviderError> {
    match max_similarity(provider, step_text, context_texts)? {
        Some((i, sim)) if sim > threshold => Ok(ConstraintVerdict::fail(
            Violation::Repetition,
            format!(
                "similarity {sim:.4} > {threshold} with {:?}",
                context_texts[i]
            ),
        )),
        _ => Ok(ConstraintVerdict::pass()),
    }
}
