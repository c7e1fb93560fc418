//! Exact engine for rotation-invariant, projectively induced Kähler-Einstein
//! potentials.
//!
//! Potentials are written in the variables `x_a = |z_a|^2` and handled as
//! truncated power series with exact rational coefficients (possibly
//! polynomial in symbolic unknowns). On top of that sit the Monge-Ampère
//! residual and exact certificate ([`geometry`]), the constraint extraction
//! and classification search ([`solver`]), an independent `(z, z̄)`
//! determinant used for cross-checking ([`oracle`]), and file formats for the
//! command-line tool ([`io`]).

pub mod exactalg;
pub mod geometry;
pub mod io;
pub mod oracle;
pub mod solver;

pub use exactalg::{CoefPoly, MultiIndex, Scalar, Series, VarId};

/// Arbitrary-precision rational, the coefficient field of the engine.
pub type Rational = num_rational::BigRational;
/// Polynomial in the symbolic unknowns over [`Rational`].
pub type Poly = CoefPoly<Rational>;
/// Truncated series in `x` over [`Rational`]-coefficient polynomials.
pub type XSeries = Series<Rational>;
