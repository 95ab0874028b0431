//! Number of reduct steps before the final coloring.
//!
//! `i*` is the least `i >= 0` with
//! `Δ (1 - shrink)^i + i · slack · Δ^dev_degree_exp <= niceness_target · k`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

use super::params::NibbleParams;

/// Scan limit for `i*`.
pub const MAX_ISTAR: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScheduleError {
    #[error("Δ = {0} is below 3, where ln Δ <= 1")]
    DegreeTooSmall(usize),
    #[error("no i <= {limit} satisfies the schedule inequality for Δ = {delta}, k = {k} (smallest left side {min_lhs} vs target {target})")]
    Infeasible {
        delta: usize,
        k: usize,
        limit: usize,
        min_lhs: f64,
        target: f64,
    },
}

/// Left side of the schedule inequality at step count `i`.
pub fn istar_lhs<T: Scalar>(delta: usize, i: usize, params: &NibbleParams<T>) -> T {
    let d = T::from_count(delta);
    let shrink = params.shrink_coeff / d.ln();
    let decay = T::one() - shrink;
    let slack = params.schedule_slack_scale * d.powf(params.dev_degree_exp);
    d * decay.powf(T::from_count(i)) + T::from_count(i) * slack
}

/// Right side: `niceness_target · k`.
pub fn istar_target<T: Scalar>(k: usize, params: &NibbleParams<T>) -> T {
    params.niceness_target * T::from_count(k)
}

/// `i*` with `k = ceil(ck Δ / ln Δ)`.
pub fn compute_istar<T: Scalar>(delta: usize, params: &NibbleParams<T>) -> Result<usize, ScheduleError> {
    if delta < 3 {
        return Err(ScheduleError::DegreeTooSmall(delta));
    }
    compute_istar_for_k(delta, params.list_size(delta), params)
}

/// `i*` for an explicit list size `k`.
pub fn compute_istar_for_k<T: Scalar>(
    delta: usize,
    k: usize,
    params: &NibbleParams<T>,
) -> Result<usize, ScheduleError> {
    if delta < 3 {
        return Err(ScheduleError::DegreeTooSmall(delta));
    }
    let target = istar_target(k, params);
    let mut min_lhs = T::infinity();
    for i in 0..=MAX_ISTAR {
        let lhs = istar_lhs(delta, i, params);
        if lhs <= target {
            return Ok(i);
        }
        if lhs < min_lhs {
            min_lhs = lhs;
        } else if params.schedule_slack_scale > T::zero() {
            // past the minimum of a convex function of i: no later i works
            break;
        }
    }
    Err(ScheduleError::Infeasible {
        delta,
        k,
        limit: MAX_ISTAR,
        min_lhs: min_lhs.to_f64_lossy(),
        target: target.to_f64_lossy(),
    })
}
