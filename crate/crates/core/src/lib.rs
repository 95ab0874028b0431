//! Correspondence coloring (DP-coloring) of graphs.
//!
//! The crate covers three workloads:
//!
//! * exact decision and counting of `(L, H)`-colorings for desk-scale instances
//!   ([`solver`]), together with the cover model ([`cover`]) and graph
//!   generators ([`graph`]);
//! * random-cover lower-bound experiments based on the first-moment method
//!   ([`first_moment`]);
//! * the randomized nibble for triangle-free graphs ([`nibble`]), with every
//!   expectation identity exposed as a closed form that tests can compare
//!   against Monte Carlo estimates.
//!
//! Real-valued code is generic over [`Scalar`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what the CLI uses.

pub mod cover;
pub mod first_moment;
pub mod graph;
pub mod io;
pub mod manifest;
pub mod nibble;
pub mod scalar;
pub mod seeds;
pub mod solver;

pub use cover::{Cover, CoverMode};
pub use graph::Graph;
pub use scalar::Scalar;
pub use solver::Coloring;

/// Weighting with double-precision weights.
pub type Weighting = nibble::Weighting<f64>;
/// Nibble parameters with double-precision constants.
pub type NibbleParams = nibble::NibbleParams<f64>;
/// Reduct state with double-precision weights.
pub type ReductState = nibble::ReductState<f64>;
/// Per-step statistics with double-precision weights.
pub type StepStats = nibble::StepStats<f64>;
/// Single-precision weighting, mainly useful for checking precision sensitivity.
pub type Weighting32 = nibble::Weighting<f32>;
/// Single-precision reduct state.
pub type ReductState32 = nibble::ReductState<f32>;
