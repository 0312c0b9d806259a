//! Temperature / top-k / top-p truncation over a discrete distribution.

use rand::{Rng, RngCore};

use crate::types::TokenSamplingParams;

/// Retained entries as `(vocab index, renormalized probability)`, most probable first.
///
/// Temperature is applied first, then top-k, then top-p. Entries with zero probability
/// are never retained. Ties in probability keep vocabulary order.
pub fn truncate(probs: &[f64], params: &TokenSamplingParams) -> Vec<(usize, f64)> {
    let mut entries: Vec<(usize, f64)> = probs
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, p)| *p > 0.0)
        .collect();
    if entries.is_empty() {
        return entries;
    }
    if params.temperature > 0.0 && params.temperature != 1.0 {
        let scaled: Vec<f64> = entries
            .iter()
            .map(|(_, p)| p.ln() / params.temperature)
            .collect();
        let max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for ((_, p), s) in entries.iter_mut().zip(&scaled) {
            *p = (s - max).exp();
        }
    }
    normalize(&mut entries);
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    if let Some(k) = params.top_k {
        entries.truncate(k.max(1));
        normalize(&mut entries);
    }
    if let Some(top_p) = params.top_p {
        let mut cumulative = 0.0;
        let mut keep = entries.len();
        for (i, (_, p)) in entries.iter().enumerate() {
            cumulative += p;
            if cumulative >= top_p - 1e-12 {
                keep = i + 1;
                break;
            }
        }
        entries.truncate(keep);
        normalize(&mut entries);
    }
    entries
}

fn normalize(entries: &mut [(usize, f64)]) {
    let z: f64 = entries.iter().map(|(_, p)| p).sum();
    if z > 0.0 {
        for (_, p) in entries.iter_mut() {
            *p /= z;
        }
    }
}

/// Index of the most probable entry, lowest index on ties.
pub fn modal(probs: &[f64]) -> Option<usize> {
    crate::scoring::argmax(probs).filter(|&i| probs[i] > 0.0)
}

/// Draws one index and reports the log-probability it was drawn with.
///
/// Greedy parameters return the modal entry with its untruncated log-probability.
pub fn sample_index(
    probs: &[f64],
    params: &TokenSamplingParams,
    rng: &mut dyn RngCore,
) -> Option<(usize, f64)> {
    if params.is_greedy() {
        return modal(probs).map(|i| (i, probs[i].ln()));
    }
    let retained = truncate(probs, params);
    let last = *retained.last()?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for &(idx, p) in &retained {
        acc += p;
        if u < acc {
            return Some((idx, p.ln()));
        }
    }
    Some((last.0, last.1.ln()))
}
