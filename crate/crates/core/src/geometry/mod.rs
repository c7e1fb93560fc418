//! Bochner-form potentials, the Kähler metric determinant in `x`, and the
//! Monge-Ampère Einstein identity `det g = exp(-(λ/2) log P)`.

mod certify;
mod induction;
mod metric;
mod potential;

pub use certify::{
    certify_exact, degree_bound_lambda, first_difference, einstein_pq, numerator_determinant,
    numerator_matrix, numerator_truncation, poly_hash, Certificate, CertificateVerdict,
    EinsteinCandidate,
};
pub use induction::{
    bochner_normalize, projective_induction_check, scaled_log_potential, InductionReport,
    InductionVerdict,
};
pub use metric::{
    check_bochner_form, det_metric, det_metric_cycles, determinant, determinant_by_elimination, ma_log_residual, metric_in_x,
    HessianX,
};
pub use potential::{build_potential, default_name, Coef, PotentialSpec, SupportTerm, Unknown, UnknownRole};

use thiserror::Error;

use crate::exactalg::{AlgebraError, MultiIndex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("duplicate support monomial {0}")]
    DuplicateSupport(MultiIndex),
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    #[error("duplicate or reserved symbol name `{0}`")]
    DuplicateSymbol(String),
    #[error("truncation {got} too low, need at least {needed}")]
    TruncationTooLow { needed: u32, got: u32 },
    #[error("potential not in Bochner form: {0}")]
    NotBochnerForm(String),
    #[error("metric degenerate at center: coefficient of x{var} is {coefficient}")]
    Degenerate { var: usize, coefficient: String },
    #[error("numeric coefficients required")]
    Symbolic,
    #[error("invalid Einstein constant: {0}")]
    InvalidLambda(String),
}
