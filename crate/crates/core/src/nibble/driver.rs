use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cover::Cover;
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::seeds;
use crate::solver::Coloring;

use super::finish::{final_color, FinalColorError};
use super::params::{Constants, NibbleParams};
use super::schedule::{compute_istar_for_k, ScheduleError};
use super::state::{NotNice, ReductState, Weighting};
use super::step::{check_reduct_targets, reduct_step, TargetViolation};
use super::NibbleError;

/// One row of the run trajectory. Row 0 is the initial state; row `i` is the
/// state after the `i`-th accepted step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TrajectoryRow<T> {
    pub step: usize,
    pub min_pv: T,
    pub max_pv: T,
    pub min_q: T,
    pub max_deg: usize,
    pub removed: usize,
    pub retries: usize,
    pub alive: usize,
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Scalar")]
pub enum NibbleStatus<T> {
    Success,
    StepRetriesExhausted {
        step: usize,
        attempts: usize,
        violations: Vec<TargetViolation<T>>,
    },
    NotNice { reason: NotNice<T> },
    FinalColorFailed { error: FinalColorError },
    ScheduleInfeasible { error: ScheduleError },
}

/// Terminal diagnostics mirroring the conditions the schedule aims for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TerminalChecks<T> {
    /// `max_v |p(v) - 1|`.
    pub max_mass_deviation: T,
    pub max_edge_mass: T,
    pub edge_cap: T,
    pub min_entropy: T,
    pub entropy_floor: T,
    pub max_degree: usize,
    pub degree_target: T,
    pub min_moderate_mass: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct NibbleReport<T> {
    pub status: NibbleStatus<T>,
    pub coloring: Option<Coloring>,
    pub seed: u64,
    pub k: usize,
    pub max_degree: usize,
    pub constants: Constants<T>,
    pub istar: Option<usize>,
    pub steps_taken: usize,
    pub nice_delta: Option<T>,
    pub final_attempts: Option<usize>,
    pub terminal: Option<TerminalChecks<T>>,
    pub trajectory: Vec<TrajectoryRow<T>>,
    pub params: NibbleParams<T>,
}

impl<T> NibbleReport<T> {
    pub fn succeeded(&self) -> bool {
        matches!(self.status, NibbleStatus::Success)
    }
}

fn snapshot<T: Scalar>(state: &ReductState<T>, step: usize, removed: usize, retries: usize) -> TrajectoryRow<T> {
    let mut min_pv = T::infinity();
    let mut max_pv = T::neg_infinity();
    let mut min_q = T::infinity();
    let mut max_deg = 0;
    for v in state.alive_vertices() {
        let pv = state.vertex_mass(v);
        min_pv = min_pv.min(pv);
        max_pv = max_pv.max(pv);
        min_q = min_q.min(state.entropy(v));
        max_deg = max_deg.max(state.current_degree(v));
    }
    if state.num_alive() == 0 {
        min_pv = T::zero();
        max_pv = T::zero();
        min_q = T::zero();
    }
    TrajectoryRow {
        step,
        min_pv,
        max_pv,
        min_q,
        max_deg,
        removed,
        retries,
        alive: state.num_alive(),
    }
}

fn terminal_checks<T: Scalar>(state: &ReductState<T>, c: &Constants<T>) -> TerminalChecks<T> {
    let mut t = TerminalChecks {
        max_mass_deviation: T::zero(),
        max_edge_mass: T::zero(),
        edge_cap: c.edge_cap,
        min_entropy: T::infinity(),
        entropy_floor: c.entropy_floor,
        max_degree: state.current_max_degree(),
        degree_target: c.degree_target,
        min_moderate_mass: T::infinity(),
    };
    for v in state.alive_vertices() {
        t.max_mass_deviation = t.max_mass_deviation.max((state.vertex_mass(v) - T::one()).abs());
        t.min_entropy = t.min_entropy.min(state.entropy(v));
        t.min_moderate_mass = t.min_moderate_mass.min(state.moderate_mass(v));
    }
    for (u, v) in state.current_edges() {
        t.max_edge_mass = t.max_edge_mass.max(state.edge_mass(u, v));
    }
    t
}

/// Runs the whole nibble on a triangle-free graph with a uniform-list cover.
///
/// Weights start at `1/k` with cap `p̂ = Δ^(-phat_exp)`. Each of the `i*`
/// steps is retried with a fresh derived seed until the per-step targets
/// hold (at most `max_retries_per_step` attempts). The final state must be
/// nice; it is then colored by [`final_color`] and extended through the
/// history. Failures are returned inside the report, with the trajectory so
/// far; only malformed inputs are errors.
pub fn run_nibble<T: Scalar>(
    graph: &Graph,
    cover: &Cover,
    params: &NibbleParams<T>,
    seed: u64,
) -> Result<NibbleReport<T>, NibbleError> {
    run_nibble_with_state(graph, cover, params, seed).map(|(report, _)| report)
}

/// [`run_nibble`], also returning the state after the last accepted step
/// (`None` when the run stopped before the first step).
pub fn run_nibble_with_state<T: Scalar>(
    graph: &Graph,
    cover: &Cover,
    params: &NibbleParams<T>,
    seed: u64,
) -> Result<(NibbleReport<T>, Option<ReductState<T>>), NibbleError> {
    params.validate()?;
    if let Some(t) = graph.find_triangle() {
        return Err(NibbleError::NotTriangleFree(t));
    }
    let report = crate::cover::validate_cover(graph, cover);
    if let Some(v) = report.violations.first() {
        return Err(NibbleError::BadCover(v.to_string()));
    }
    let k = match cover.uniform_k() {
        Some(k) if k > 0 => k,
        _ if graph.n() == 0 => 1,
        _ => return Err(NibbleError::NonUniformLists),
    };
    let delta = graph.max_degree();
    let c = params.constants(delta, k);
    let mut out = NibbleReport {
        status: NibbleStatus::Success,
        coloring: None,
        seed,
        k,
        max_degree: delta,
        constants: c,
        istar: None,
        steps_taken: 0,
        nice_delta: None,
        final_attempts: None,
        terminal: None,
        trajectory: Vec::new(),
        params: params.clone(),
    };

    if graph.num_edges() == 0 {
        // independence is vacuous: every lowest color works
        let chosen = (0..graph.n())
            .map(|v| *cover.list(v).iter().min().expect("k > 0"))
            .collect();
        out.istar = Some(0);
        out.coloring = Some(Coloring::new(chosen));
        return Ok((out, None));
    }

    let initial = T::one() / T::from_count(k);
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
    if !(c.p_hat > initial) {
        return Err(NibbleError::BadParams(format!(
            "weight cap p̂ = {} does not exceed the initial weight 1/k = {initial}",
            c.p_hat
        )));
    }
    if c.alpha * c.p_hat > T::one() {
        return Err(NibbleError::BadParams(format!(
            "α p̂ = {} exceeds 1",
            c.alpha * c.p_hat
        )));
    }
    let weighting = Weighting::uniform(cover.num_colors(), initial, c.p_hat)?;
    let mut state = ReductState::new(Arc::new(graph.clone()), Arc::new(cover.clone()), weighting)?;
    out.trajectory.push(snapshot(&state, 0, 0, 0));

    let istar = match compute_istar_for_k(delta.max(3), k, params) {
        Ok(i) => i,
        Err(error) => {
            out.status = NibbleStatus::ScheduleInfeasible { error };
            return Ok((out, None));
        }
    };
    out.istar = Some(istar);

    for step in 0..istar {
        let mut accepted = None;
        let mut last_violations = Vec::new();
        for attempt in 0..params.max_retries_per_step {
            let step_seed = seeds::derive(seed, "nibble-step", &[step as u64, attempt as u64]);
            let (next, stats) = reduct_step(&state, c.alpha, step_seed);
            let targets = check_reduct_targets(&state, &stats, &c);
            if targets.passed() {
                accepted = Some((next, stats.removed.len(), attempt));
                break;
            }
            last_violations = targets.violations;
        }
        match accepted {
            Some((next, removed, retries)) => {
                state = next;
                out.steps_taken = step + 1;
                out.trajectory.push(snapshot(&state, step + 1, removed, retries));
            }
            None => {
                out.status = NibbleStatus::StepRetriesExhausted {
                    step,
                    attempts: params.max_retries_per_step,
                    violations: last_violations,
                };
                return Ok((out, Some(state)));
            }
        }
    }

    out.terminal = Some(terminal_checks(&state, &c));
    let delta_nice = match state.check_nice() {
        Ok(d) => d,
        Err(reason) => {
            out.status = NibbleStatus::NotNice { reason };
            return Ok((out, Some(state)));
        }
    };
    out.nice_delta = Some(delta_nice);
    let final_seed = seeds::derive(seed, "nibble-final", &[]);
    let inner = match final_color(&state, delta_nice, final_seed, params.max_final_retries) {
        Ok(f) => f,
        Err(error) => {
            out.status = NibbleStatus::FinalColorFailed { error };
            return Ok((out, Some(state)));
        }
    };
    out.final_attempts = Some(inner.attempts);
    out.coloring = Some(state.extend_coloring(&inner.chosen)?);
    Ok((out, Some(state)))
}
