//! Final coloring of a nice state by sampling and resampling.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::seeds;

use super::state::ReductState;

#[derive(Debug, Error, Clone, PartialEq, Serialize, Deserialize)]
pub enum FinalColorError {
    #[error("no coloring found in {attempts} attempts")]
    Exhausted { attempts: usize },
    #[error("δ = {0} must be positive")]
    BadDelta(f64),
    #[error("inclusion probability 2p(x)/δ = {prob} exceeds 1 for color {color}")]
    ProbabilityAboveOne { color: usize, prob: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalColoring {
    /// Chosen color per original vertex; `None` outside the current graph.
    pub chosen: Vec<Option<usize>>,
    /// Attempts used, counting the successful one.
    pub attempts: usize,
}

/// Colors the current graph with moderate colors.
///
/// Each attempt includes every moderate color `x` in a random set `M` with
/// probability `2 p(x) / δ`, then discards every member of `M` matched in `H`
/// to another member (both ends of each occurring forbidden pair). If each
/// vertex keeps a color, the lowest surviving id per vertex is returned;
/// otherwise the next attempt draws a fresh `M`.
pub fn final_color<T: Scalar>(
    state: &ReductState<T>,
    delta: T,
    seed: u64,
    max_attempts: usize,
) -> Result<FinalColoring, FinalColorError> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
    if !(delta > T::zero()) {
        return Err(FinalColorError::BadDelta(delta.to_f64_lossy()));
    }
    let w = state.weighting();
    let cover = state.cover();
    let nc = cover.num_colors();
    let two = T::lit(2.0);
    let moderate: Vec<bool> = (0..nc)
        .map(|x| state.color_alive(x) && w.is_moderate(x))
        .collect();
    let prob: Vec<T> = (0..nc)
        .map(|x| if moderate[x] { two * w.get(x) / delta } else { T::zero() })
        .collect();
    if let Some(x) = (0..nc).find(|&x| prob[x] > T::one()) {
        return Err(FinalColorError::ProbabilityAboveOne {
            color: x,
            prob: prob[x].to_f64_lossy(),
        });
    }
    let n = state.graph().n();
    for attempt in 0..max_attempts {
        let key = seeds::derive(seed, "final-color", &[attempt as u64]);
        let in_m: Vec<bool> = (0..nc)
            .map(|x| moderate[x] && T::lit(seeds::unit(key, x as u64, 0)) < prob[x])
            .collect();
        let mut chosen = vec![None; n];
        let mut ok = true;
        for v in state.alive_vertices() {
            let pick = cover
                .list(v)
                .iter()
                .copied()
                .filter(|&x| in_m[x] && !cover.color_neighbors(x).iter().any(|&y| in_m[y]))
                .min();
            match pick {
                Some(x) => chosen[v] = Some(x),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(FinalColoring {
                chosen,
                attempts: attempt + 1,
            });
        }
    }
    Err(FinalColorError::Exhausted {
        attempts: max_attempts,
    })
}
