//! Load balancing on unrelated machines where each machine aggregates its
//! assigned processing times through a monotone symmetric norm and the
//! resulting load vector is scored by a second (outer) norm.
//!
//! The crate is organised bottom-up:
//!
//! * [`norms`] — the norm family (`Lp`, `TopK`, `Ordered`, `Scaled`, `MaxOf`)
//!   and the `Top_k` calculus everything else is built on.
//! * [`instance`] — problem instances, assignments, generators and JSON I/O.
//! * [`lp`] — a small dense-tableau simplex with dual values, basic solutions
//!   and Farkas infeasibility certificates.
//! * [`exact`] — brute-force optima used as ground truth by tests and ratio
//!   reporting.
//! * [`normlin`] — norm-minimising selection under a linear covering
//!   constraint, solved by guess enumeration plus a small LP (a PTAS).
//! * [`oracle`] — the approximate separation oracle for the dual polytope of
//!   the configuration LP.
//! * [`glb`] — the configuration-LP solver itself: guessing, direct and
//!   round-or-cut solves, randomized rounding, merging.
//! * [`maxtopk`] — the specialised algorithm for `max_i Top_{k_i}` objectives.
//! * [`baseline`] — a greedy reference heuristic.
//! * [`verify`] — reusable randomized property checks for the norm layer.
//!
//! Start with the runnable programs in `examples/` — there is one per major
//! capability.

pub mod baseline;
pub mod exact;
pub mod glb;
pub mod instance;
pub mod lp;
pub mod maxtopk;
pub mod normlin;
pub mod norms;
pub mod oracle;
pub mod verify;

/// Shared numerical tolerances. Every comparison in the crate goes through
/// one of these so that the tolerance story stays consistent.
pub mod tol {
    /// Constraint-satisfaction slack: a row `a·x <= b` counts as satisfied
    /// when `a·x <= b + FEASIBILITY`.
    pub const FEASIBILITY: f64 = 1e-7;
    /// Anything with absolute value at most this counts as zero (support
    /// detection, certificate strictness).
    pub const ZERO: f64 = 1e-9;
    /// Nudge subtracted inside `ceil` on floating logarithms so that exact
    /// powers do not round one step too high.
    pub const LOG_NUDGE: f64 = 1e-12;
}

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("invalid vector argument: {0}")]
    InvalidVector(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("instance exceeds cap for this solver: {0}")]
    CapExceeded(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("linear program error: {0}")]
    Lp(#[from] lp::LpError),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
