//! Picking one chain out of a candidate pool.
//!
//! Pairwise scorers give candidate j the score sum over k != j of S(y_j, y_k) and pick
//! the argmax; ties go to the lowest index everywhere.

pub mod answer;
pub mod ngram;
pub mod verifier;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::constraints::{cosine_similarity, ProviderError, SimilarityProvider};
use crate::generation::GenerationError;
use crate::scoring::argmax;
use crate::types::{CandidatePool, ContractError, ReasoningChain};

pub use answer::{answers_match, extract_answer, extract_answer_text, normalize_answer, TaskKind};
pub use ngram::{ngram_set, ngram_similarity, NGramSet};
pub use verifier::{VerifierClient, VERIFIER_TEMPLATE};

#[derive(Debug, Error)]
pub enum SelectionError {
    #[error("cannot select from an empty pool")]
    EmptyPool,
    #[error(transparent)]
    Contract(#[from] ContractError),
    #[error("similarity provider failed: {0}")]
    Provider(#[from] ProviderError),
    #[error("verifier failed: {0}")]
    Verifier(#[from] GenerationError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub chosen_index: usize,
    pub chosen_chain: ReasoningChain,
    pub scores: Vec<f64>,
    pub scorer_name: String,
    pub diagnostics: Vec<String>,
}

/// What a scorer may look at besides the pool.
#[derive(Debug, Clone, Default)]
pub struct SelectionContext {
    pub question: String,
    pub task_kind: TaskKind,
}

impl SelectionContext {
    pub fn new(question: impl Into<String>, task_kind: TaskKind) -> Self {
        SelectionContext {
            question: question.into(),
            task_kind,
        }
    }
}

pub trait Scorer: Send + Sync {
    fn name(&self) -> &str;

    fn select(
        &self,
        pool: &CandidatePool,
        ctx: &SelectionContext,
    ) -> Result<SelectionResult, SelectionError>;
}

fn result_from_scores(
    pool: &CandidatePool,
    scores: Vec<f64>,
    name: &str,
    diagnostics: Vec<String>,
) -> Result<SelectionResult, SelectionError> {
    let chosen_index = argmax(&scores).ok_or(SelectionError::EmptyPool)?;
    Ok(SelectionResult {
        chosen_index,
        chosen_chain: pool.candidates[chosen_index].clone(),
        scores,
        scorer_name: name.to_string(),
        diagnostics,
    })
}

/// Pairwise selection with a symmetric similarity `sim(j, k)` over pool indices.
/// Makes exactly K(K-1)/2 calls to `sim`.
pub fn select_by_pairwise<F>(
    pool: &CandidatePool,
    name: &str,
    mut sim: F,
) -> Result<SelectionResult, SelectionError>
where
    F: FnMut(usize, usize) -> Result<f64, SelectionError>,
{
    let k = pool.len();
    if k == 0 {
        return Err(SelectionError::EmptyPool);
    }
    let mut scores = vec![0.0; k];
    for j in 0..k {
        for l in j + 1..k {
            let s = sim(j, l)?;
            scores[j] += s;
            scores[l] += s;
        }
    }
    result_from_scores(pool, scores, name, Vec::new())
}

/// Pairwise selection by shared n-gram count over whole-chain text.
pub fn select_by_ngram(pool: &CandidatePool, n: usize) -> Result<SelectionResult, SelectionError> {
    let sets: Vec<NGramSet> = pool
        .candidates
        .iter()
        .map(|c| ngram_set(&c.text(), n))
        .collect::<Result<_, _>>()?;
    select_by_pairwise(pool, "ngram", |j, k| {
        Ok(ngram_similarity(&sets[j], &sets[k])? as f64)
    })
}

/// Counts of normalized answers, with the first pool index carrying each.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnswerTally {
    pub counts: BTreeMap<String, usize>,
    pub first_index: BTreeMap<String, usize>,
}

impl AnswerTally {
    pub fn from_pool(pool: &CandidatePool, kind: TaskKind) -> (Self, Vec<Option<String>>) {
        let mut tally = AnswerTally::default();
        let answers: Vec<Option<String>> = pool
            .candidates
            .iter()
            .map(|c| extract_answer(c, kind).map(|a| normalize_answer(&a)))
            .collect();
        for (i, a) in answers.iter().enumerate() {
            if let Some(a) = a {
                *tally.counts.entry(a.clone()).or_insert(0) += 1;
                tally.first_index.entry(a.clone()).or_insert(i);
            }
        }
        (tally, answers)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Most frequent answer; among equals, the one seen first in the pool.
    pub fn winner(&self) -> Option<(&str, usize)> {
        self.counts
            .iter()
            .max_by(|a, b| {
                a.1.cmp(b.1)
                    .then(self.first_index[b.0].cmp(&self.first_index[a.0]))
            })
            .map(|(a, n)| (a.as_str(), *n))
    }
}

/// Majority vote over extracted answers. A candidate's score is the count of its answer.
pub fn select_self_consistency(
    pool: &CandidatePool,
    kind: TaskKind,
) -> Result<SelectionResult, SelectionError> {
    if pool.is_empty() {
        return Err(SelectionError::EmptyPool);
    }
    let (tally, answers) = AnswerTally::from_pool(pool, kind);
    let scores: Vec<f64> = answers
        .iter()
        .map(|a| a.as_ref().map_or(0.0, |a| tally.counts[a] as f64))
        .collect();
    let mut diagnostics = Vec::new();
    if tally.total() == 0 {
        diagnostics.push("no candidate states a parseable answer; using the first".to_string());
    }
    result_from_scores(pool, scores, "selfcons", diagnostics)
}

/// Pairwise selection by cosine similarity of whole-chain embeddings.
pub fn select_by_cosine(
    pool: &CandidatePool,
    provider: &dyn SimilarityProvider,
) -> Result<SelectionResult, SelectionError> {
    if pool.is_empty() {
        return Err(SelectionError::EmptyPool);
    }
    let texts: Vec<String> = pool.candidates.iter().map(ReasoningChain::text).collect();
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let vectors = provider.embed(&refs)?;
    if vectors.len() != refs.len() {
        return Err(ProviderError::Malformed("embedding count mismatch".into()).into());
    }
    select_by_pairwise(pool, "cosine", |j, k| {
        Ok(cosine_similarity(&vectors[j], &vectors[k])?)
    })
}

/// Ranks candidates by verifier score. A candidate whose request fails scores 0.
pub fn verifier_rank(
    pool: &CandidatePool,
    question: &str,
    client: &VerifierClient,
) -> Result<SelectionResult, SelectionError> {
    if pool.is_empty() {
        return Err(SelectionError::EmptyPool);
    }
    let mut diagnostics = Vec::new();
    let mut failures = 0;
    let mut last_err = None;
    let scores: Vec<f64> = pool
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| match client.score(question, &c.text()) {
            Ok(s) => s,
            Err(e) => {
                diagnostics.push(format!("candidate {i}: {e}"));
                failures += 1;
                last_err = Some(e);
                0.0
            }
        })
        .collect();
    if failures == pool.len() {
        return Err(last_err.expect("at least one failure").into());
    }
    result_from_scores(pool, scores, "verifier", diagnostics)
}

pub struct NGramScorer {
    pub n: usize,
}

impl Default for NGramScorer {
    fn default() -> Self {
        NGramScorer { n: 3 }
    }
}

impl Scorer for NGramScorer {
    fn name(&self) -> &str {
        "ngram"
    }

    fn select(
        &self,
        pool: &CandidatePool,
        _: &SelectionContext,
    ) -> Result<SelectionResult, SelectionError> {
        select_by_ngram(pool, self.n)
    }
}

#[derive(Default)]
pub struct SelfConsistencyScorer;

impl Scorer for SelfConsistencyScorer {
    fn name(&self) -> &str {
        "selfcons"
    }

    fn select(
        &self,
        pool: &CandidatePool,
        ctx: &SelectionContext,
    ) -> Result<SelectionResult, SelectionError> {
        select_self_consistency(pool, ctx.task_kind)
    }
}

pub struct CosineScorer {
    pub provider: Box<dyn SimilarityProvider>,
}

impl Scorer for CosineScorer {
    fn name(&self) -> &str {
        "cosine"
    }

    fn select(
        &self,
        pool: &CandidatePool,
        _: &SelectionContext,
    ) -> Result<SelectionResult, SelectionError> {
        select_by_cosine(pool, self.provider.as_ref())
    }
}

pub struct VerifierScorer {
    pub client: VerifierClient,
}

impl Scorer for VerifierScorer {
    fn name(&self) -> &str {
        "verifier"
    }

    fn select(
        &self,
        pool: &CandidatePool,
        ctx: &SelectionContext,
    ) -> Result<SelectionResult, SelectionError> {
        verifier_rank(pool, &ctx.question, &self.client)
    }
}
