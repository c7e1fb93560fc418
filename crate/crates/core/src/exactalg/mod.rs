//! Exact coefficient arithmetic: rationals, polynomials in symbolic
//! unknowns, and total-degree-truncated power series over them.

mod coef_poly;
mod multi_index;
mod scalar;
mod series;

pub use coef_poly::{CoefPoly, DisplayPoly, Monomial, VarId};
pub use multi_index::MultiIndex;
pub use scalar::{format_rational, parse_rational, OrderedScalar, Scalar};
pub use series::Series;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: u32, right: u32 },
    #[error("series has a nonzero constant term")]
    NonzeroConstant,
    #[error("series constant term is not an invertible scalar")]
    NotInvertible,
    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}
