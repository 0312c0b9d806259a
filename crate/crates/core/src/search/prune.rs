use rand::{Rng, RngCore};

use crate::scoring::step_selection_distribution;
use crate::types::NodeId;

/// Step temperatures at or below this select deterministically (the greedy limit).
pub const GREEDY_TAU: f64 = 1e-6;

pub fn tau_to_greedy(tau: f64) -> bool {
    tau <= GREEDY_TAU
}

/// Keeps at most `capacity` leaves.
///
/// Leaves are drawn one at a time without replacement, each draw from the softmax of
/// the remaining leaves' scores at temperature `tau`. In the greedy limit the top
/// `capacity` scores are kept, ties going to the lowest node id. Kept ids are returned
/// in ascending id order.
pub fn prune_frontier(
    leaves: &[(NodeId, f64)],
    capacity: usize,
    tau: f64,
    rng: &mut dyn RngCore,
) -> Vec<NodeId> {
    let mut kept: Vec<NodeId> = if leaves.len() <= capacity {
        leaves.iter().map(|l| l.0).collect()
    } else if tau_to_greedy(tau) {
        let mut sorted = leaves.to_vec();
        sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        sorted.into_iter().take(capacity).map(|l| l.0).collect()
    } else {
        let mut remaining = leaves.to_vec();
        let mut out = Vec::with_capacity(capacity);
        for _ in 0..capacity {
            let scores: Vec<f64> = remaining.iter().map(|l| l.1).collect();
            let probs =
                step_selection_distribution(&scores, tau).expect("tau > 0 and finite scores");
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = remaining.len() - 1;
            for (i, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    pick = i;
                    break;
                }
            }
            out.push(remaining.remove(pick).0);
        }
        out
    };
    kept.sort();
    kept
}
