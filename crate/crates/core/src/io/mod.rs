//! JSON spec and potential files, and JSON/text rendering of reports.
//!
//! Rationals are always written as strings `"p"` or `"p/q"`; decimal
//! notation is rejected on input.

mod json;
mod potential_file;
mod report;
mod spec_file;

pub use potential_file::{parse_potential_file, PotentialForm, PotentialSource};
pub use report::{
    constraints_report, induced_report, normalize_report, oracle_report, verify_report,
    ConstraintsReport, Format, InducedReport, NormalizeReport, OracleCheckReport, Render,
    ResidualSummary, VerifyMode, VerifyReport, VerifyResult,
};
pub use spec_file::{emit_spec_file, parse_spec_file, SpecFile};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::oracle::OracleError;
use crate::solver::SolverError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl IoError {
    pub(crate) fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        IoError::Field { path: path.into(), message: message.into() }
    }
}
