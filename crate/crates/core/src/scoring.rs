//! Step scoring, the step-selection softmax and temperature annealing.

use crate::types::ContractError;

/// Length-normalized log-likelihood of a step: `sum(logprobs) / N^length_penalty`.
pub fn score_step(token_logprobs: &[f64], length_penalty: f64) -> Result<f64, ContractError> {
    if token_logprobs.is_empty() {
        return Err(ContractError::Empty("token logprobs"));
    }
    if let Some(bad) = token_logprobs.iter().find(|l| !l.is_finite() || **l > 0.0) {
        return Err(ContractError::invalid(
            "logprob",
            format!("{bad} is not a finite value <= 0"),
        ));
    }
    let n = token_logprobs.len() as f64;
    let total: f64 = token_logprobs.iter().sum();
    Ok(total / n.powf(length_penalty))
}

/// Softmax of `scores / tau`, max-shifted so large scores cannot overflow.
pub fn step_selection_distribution(scores: &[f64], tau: f64) -> Result<Vec<f64>, ContractError> {
    if scores.is_empty() {
        return Err(ContractError::Empty("scores"));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(ContractError::invalid("tau", format!("{tau} must be > 0")));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(ContractError::invalid("scores", "must be finite"));
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = scores.iter().map(|s| ((s - max) / tau).exp()).collect();
    let z: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / z).collect())
}

/// `tau * alpha^steps`.
pub fn anneal_temperature(tau: f64, alpha: f64, steps: u32) -> f64 {
    tau * alpha.powi(steps as i32)
}

/// Index of the largest value; ties go to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        match best {
            Some(b) if values[b] >= *v => {}
            _ => best = Some(i),
        }
    }
    best
}
