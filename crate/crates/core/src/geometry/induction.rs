use num_traits::{One, Signed};
use serde::Serialize;

use super::GeometryError;
use crate::exactalg::{format_rational, MultiIndex, Series};
use crate::{Poly, Rational, XSeries};

fn numeric_coeff(s: &XSeries, m: &MultiIndex) -> Result<Rational, GeometryError> {
    s.coeff(m).as_constant().ok_or(GeometryError::Symbolic)
}

/// Rescales `x_a -> x_a / c_a` so that the linear part becomes `sum x_a`.
///
/// Returns the normalised series and the original linear coefficients `c_a`.
pub fn bochner_normalize(phi: &XSeries) -> Result<(XSeries, Vec<Rational>), GeometryError> {
    if !phi.is_numeric() {
        return Err(GeometryError::Symbolic);
    }
    if !phi.constant_term().is_zero() {
        return Err(GeometryError::NotBochnerForm("potential must vanish at the center".into()));
    }
    let n = phi.dim();
    let mut scale = Vec::with_capacity(n);
    for a in 0..n {
        let c = numeric_coeff(phi, &MultiIndex::unit(n, a))?;
        if !c.is_positive() {
            return Err(GeometryError::Degenerate { var: a + 1, coefficient: format_rational(&c) });
        }
        scale.push(c);
    }
    let mut out = Series::zero(n, phi.truncation());
    for (m, c) in phi.terms() {
        let mut factor = Rational::one();
        for (a, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                factor /= &scale[a];
            }
        }
        out.add_term(m.clone(), c.scale(&factor));
    }
    Ok((out, scale))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum InductionVerdict {
    /// All coefficients of `exp(Φ) - 1` through the given degree are nonnegative.
    #[serde(rename = "INDUCED-UP-TO-D")]
    InducedUpTo { degree: u32, codimension: usize },
    #[serde(rename = "NOT-INDUCED")]
    NotInduced { witness: String, coefficient: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InductionReport {
    pub dim: usize,
    pub degree: u32,
    /// Nonzero coefficients of `exp(Φ) - 1`, graded order.
    #[serde(serialize_with = "serialize_coeffs")]
    pub coefficients: Vec<(MultiIndex, Rational)>,
    #[serde(flatten)]
    pub verdict: InductionVerdict,
}

fn serialize_coeffs<S: serde::Serializer>(
    v: &[(MultiIndex, Rational)],
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (m, c) in v {
        seq.serialize_element(&(m.exponents(), format_rational(c)))?;
    }
    seq.end()
}

impl InductionReport {
    pub fn is_induced(&self) -> bool {
        matches!(self.verdict, InductionVerdict::InducedUpTo { .. })
    }
}

/// Reads off the candidate immersion from `E = exp(Φ) - 1`.
///
/// A diastasis `Φ = log(1 + sum |f_j|^2)` has `E = sum a_j x^{m_j}` with
/// every `a_j >= 0`; a negative coefficient through degree `D` rules the
/// potential out. A nonnegative result only speaks for degrees up to `D`.
pub fn projective_induction_check(phi: &XSeries, degree: u32) -> Result<InductionReport, GeometryError> {
    if !phi.is_numeric() {
        return Err(GeometryError::Symbolic);
    }
    if degree > phi.truncation() {
        return Err(GeometryError::TruncationTooLow { needed: degree, got: phi.truncation() });
    }
    let n = phi.dim();
    let phi = phi.with_truncation(degree);
    if !phi.constant_term().is_zero() {
        return Err(GeometryError::NotBochnerForm("potential must vanish at the center".into()));
    }
    let e = &phi.exp()? - &Series::one(n, degree);
    let coefficients: Vec<(MultiIndex, Rational)> = e
        .terms()
        .map(|(m, c)| (m.clone(), c.as_constant().expect("numeric")))
        .collect();
    let verdict = match coefficients.iter().find(|(_, c)| c.is_negative()) {
        Some((m, c)) => {
            InductionVerdict::NotInduced { witness: m.to_string(), coefficient: format_rational(c) }
        }
        None => InductionVerdict::InducedUpTo {
            degree,
            codimension: coefficients.len().saturating_sub(n),
        },
    };
    Ok(InductionReport { dim: n, degree, coefficients, verdict })
}

/// `scale * log(1 + inner)` as a series, the usual way potentials are written.
pub fn scaled_log_potential(inner: &XSeries, scale: &Rational) -> Result<XSeries, GeometryError> {
    Ok(inner.log1p()?.scale(&Poly::constant(scale.clone())))
}
