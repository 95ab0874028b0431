//! The nibble for triangle-free graphs.
//!
//! A weighting `p` on the colors starts uniform at `1/k`. Each reduct step
//! samples a sparse random set `S` of colors, permanently colors the vertices
//! whose sampled colors are conflict-free (the removed set `A`), and rescales
//! the remaining weights so that every weight is a martingale. After `i*`
//! steps the residual instance is *nice* and is colored by sampling; the
//! recorded history then extends that coloring back to the original graph.
//!
//! The asymptotic existence arguments are replaced by bounded resampling with
//! explicit budgets: a step is retried until its deviation targets hold, and
//! the final sampler is retried until it yields a coloring.

mod driver;
mod finish;
mod params;
mod schedule;
mod state;
mod step;

use thiserror::Error;

pub use driver::{run_nibble, run_nibble_with_state, NibbleReport, NibbleStatus, TerminalChecks, TrajectoryRow};
pub use finish::{final_color, FinalColorError, FinalColoring};
pub use params::{effective_degree, Constants, NibbleParams};
pub use schedule::{compute_istar, compute_istar_for_k, istar_lhs, istar_target, ScheduleError, MAX_ISTAR};
pub use state::{entropy_of, extend_coloring, InducedInstance, NotNice, ReductRecord, ReductState, Weighting};
pub use step::{
    check_reduct_targets, degree_expectation_bound, entropy_expectation_bound, expected_pprime, k_factor,
    reduct_step, StepStats, TargetReport, TargetViolation,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NibbleError {
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("invalid weighting: {0}")]
    BadWeighting(String),
    #[error("invalid cover: {0}")]
    BadCover(String),
    #[error("graph is not triangle-free: {0:?} is a triangle")]
    NotTriangleFree((usize, usize, usize)),
    #[error("lists must all have the same positive size")]
    NonUniformLists,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}
