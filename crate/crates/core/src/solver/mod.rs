//! Constraint extraction from the Monge-Ampère residual, an exact solver for
//! the resulting polynomial systems, and the classification sweep over
//! supports.

mod classify;
mod enumerate;
mod solve;
mod sweep;
mod system;
mod univariate;

pub use classify::{classify, constant_shortcut, match_model_potential, ModelTag};
pub use enumerate::{
    candidate_monomials, canonical_supports, enumerate_supports, is_canonical, permutations,
};
pub use solve::{
    render_assignment, solve_system, Assignment, Remnant, SolveOutcome, SolveStatus,
    UnresolvedReason, Witness, WitnessKind,
};
pub use sweep::{
    canonical_numeric, solve_spec, sweep, BlockMethod, BlockReport, ClassificationReport,
    ModelRecord, RemnantRecord, SolutionRecord, SpecEntry, Summary, SweepConfig, WitnessRecord,
    REPORT_SCHEMA,
};
pub use system::{extract_constraints, ConstraintSystem, Equation, EquationRecord, SystemRecord};
pub use univariate::UPoly;

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("truncation {got} too low, need at least {needed}")]
    TruncationTooLow { needed: u32, got: u32 },
    #[error("classification disagreement: {0}")]
    Classification(String),
    #[error("invalid sweep parameters: {0}")]
    InvalidParameters(String),
    #[error("worker pool: {0}")]
    WorkerPool(String),
}

#[cfg(test)]
mod tests;
