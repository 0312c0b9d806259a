use crate::selection::{
    extract_answer, normalize_answer, Scorer, SelectionContext, SelectionError, TaskKind,
};
use crate::types::CandidatePool;

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub chosen_index: Option<usize>,
    pub chosen_answer: Option<String>,
    pub correct: bool,
    /// Some candidate in the pool carries the gold answer.
    pub upper_bound: bool,
    pub diagnostics: Vec<String>,
}

/// Selects from `pool` and grades the choice against `gold`. An empty pool is simply wrong.
pub fn evaluate(
    pool: &CandidatePool,
    gold: &str,
    kind: TaskKind,
    scorer: &dyn Scorer,
    question: &str,
) -> Result<Evaluation, SelectionError> {
    if pool.is_empty() {
        return Ok(Evaluation {
            chosen_index: None,
            chosen_answer: None,
            correct: false,
            upper_bound: false,
            diagnostics: vec!["empty candidate pool".to_string()],
        });
    }
    let gold = normalize_answer(gold);
    let upper_bound = pool
        .candidates
        .iter()
        .any(|c| extract_answer(c, kind).is_some_and(|a| normalize_answer(&a) == gold));
    let selection = scorer.select(pool, &SelectionContext::new(question, kind))?;
    let chosen_answer = extract_answer(&selection.chosen_chain, kind);
    let correct = chosen_answer
        .as_deref()
        .is_some_and(|a| normalize_answer(a) == gold);
    Ok(Evaluation {
        chosen_index: Some(selection.chosen_index),
        chosen_answer,
        correct,
        upper_bound,
        diagnostics: selection.diagnostics,
    })
}
