use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{build_potential, determinant, GeometryError, PotentialSpec};
use crate::exactalg::{format_rational, MultiIndex, Series};
use crate::{Rational, XSeries};

/// A numeric potential together with a proposed Einstein constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EinsteinCandidate {
    pub spec: PotentialSpec,
    pub lambda: Rational,
}

impl EinsteinCandidate {
    pub fn new(spec: PotentialSpec, lambda: Rational) -> Result<Self, GeometryError> {
        if spec.is_symbolic() {
            return Err(GeometryError::Symbolic);
        }
        if !lambda.is_positive() {
            return Err(GeometryError::InvalidLambda(format!(
                "Einstein constant must be positive, got {}",
                format_rational(&lambda)
            )));
        }
        Ok(EinsteinCandidate { spec, lambda })
    }

    /// `0 < λ <= 2(n + 1)`.
    pub fn within_einstein_bounds(&self) -> bool {
        let cap = Rational::from_integer(BigInt::from(2 * (self.spec.dim() as i64 + 1)));
        self.lambda.is_positive() && self.lambda <= cap
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum CertificateVerdict {
    Pass { lhs_hash: String, rhs_hash: String },
    Fail { monomial: String, lhs: String, rhs: String },
}

/// Outcome of the exact check `det(M)^q = P^(2nq - p)` where `λ/2 = p/q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub lambda: String,
    pub p: u64,
    pub q: u64,
    pub exponent: u64,
    #[serde(flatten)]
    pub verdict: CertificateVerdict,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, CertificateVerdict::Pass { .. })
    }
}

/// `M_ab = δ_ab P P_a + x_a (P P_ab - P_a P_b)`, the x-space form of the
/// numerator `P P_{z_a z̄_b} - P_{z_a} P_{z̄_b}`; `det M = P^{2n} det g`.
///
/// `p` must hold the full polynomial at a truncation large enough for the
/// products involved (see [`numerator_truncation`]).
pub fn numerator_matrix(p: &XSeries) -> Result<Vec<Vec<XSeries>>, GeometryError> {
    let n = p.dim();
    let d = p.truncation();
    let first: Vec<XSeries> = (0..n).map(|a| p.diff(a)).collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(n);
    for a in 0..n {
        let xa = Series::var(n, d, a);
        let mut row = Vec::with_capacity(n);
        for b in 0..n {
            let pab = first[a].diff(b)?;
            let inner = &(p * &pab) - &(&first[a] * &first[b]);
            let mut entry = &xa * &inner;
            if a == b {
                entry = &entry + &(p * &first[a]);
            }
            row.push(entry);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Degree bound for `det M`: each entry has degree at most `2 deg P - 1`.
pub fn numerator_truncation(spec: &PotentialSpec) -> u32 {
    spec.dim() as u32 * (2 * spec.degree() - 1)
}

/// `det M` as an exact polynomial.
pub fn numerator_determinant(spec: &PotentialSpec) -> Result<XSeries, GeometryError> {
    numerator_determinant_at(spec, numerator_truncation(spec))
}

fn numerator_determinant_at(spec: &PotentialSpec, t: u32) -> Result<XSeries, GeometryError> {
    if spec.is_symbolic() {
        return Err(GeometryError::Symbolic);
    }
    let p = build_potential(spec, t.max(spec.degree()))?;
    Ok(determinant(&numerator_matrix(&p)?))
}

/// Exact, truncation-free Monge-Ampère check.
///
/// With `λ/2 = p/q` in lowest terms, `det g = P^{-λ/2}` is equivalent to the
/// polynomial identity `det(M)^q = P^{2nq - p}`, which is compared
/// coefficient by coefficient.
pub fn certify_exact(cand: &EinsteinCandidate) -> Result<Certificate, GeometryError> {
    let spec = &cand.spec;
    let n = spec.dim() as u64;
    let half = &cand.lambda / Rational::from_integer(2.into());
    let (p, q) = (half.numer().clone(), half.denom().clone());
    let p = p.to_u64().filter(|v| *v > 0).ok_or_else(|| {
        GeometryError::InvalidLambda(format!("bad Einstein constant {}", format_rational(&cand.lambda)))
    })?;
    let q = q.to_u64().ok_or_else(|| GeometryError::InvalidLambda("denominator too large".into()))?;
    if 2 * n * q < p {
        return Err(GeometryError::InvalidLambda(format!(
            "2nq - p < 0 for λ = {}",
            format_rational(&cand.lambda)
        )));
    }
    let exponent = 2 * n * q - p;
    let det_deg = numerator_truncation(spec) as u64;
    let t = (q * det_deg).max(exponent * spec.degree() as u64);
    let t = u32::try_from(t).map_err(|_| GeometryError::InvalidLambda("degree too large".into()))?;

    let det = numerator_determinant_at(spec, t)?.with_truncation(t);
    let pot = build_potential(spec, t)?;
    let lhs = det.pow(q as u32);
    let rhs = pot.pow(exponent as u32);

    let verdict = match first_difference(&lhs, &rhs) {
        None => CertificateVerdict::Pass { lhs_hash: poly_hash(&lhs), rhs_hash: poly_hash(&rhs) },
        Some(m) => CertificateVerdict::Fail {
            monomial: m.to_string(),
            lhs: constant_string(&lhs, &m),
            rhs: constant_string(&rhs, &m),
        },
    };
    Ok(Certificate { lambda: format_rational(&cand.lambda), p, q, exponent, verdict })
}

fn constant_string(s: &XSeries, m: &MultiIndex) -> String {
    format_rational(&s.coeff(m).as_constant().expect("numeric series"))
}

/// First monomial (graded order) where two series differ.
pub fn first_difference(a: &XSeries, b: &XSeries) -> Option<MultiIndex> {
    let mut ks: Vec<&MultiIndex> = a.terms().map(|(m, _)| m).chain(b.terms().map(|(m, _)| m)).collect();
    ks.sort();
    ks.dedup();
    ks.into_iter().find(|m| a.coeff(m) != b.coeff(m)).cloned()
}

/// SHA-256 over the canonical `exponents coefficient` listing.
pub fn poly_hash(s: &XSeries) -> String {
    let mut h = Sha256::new();
    for (m, c) in s.terms() {
        let line = format!(
            "{:?} {}\n",
            m.exponents(),
            c.as_constant().map(|r| format_rational(&r)).unwrap_or_else(|| c.to_string())
        );
        h.update(line.as_bytes());
    }
    hex::encode(h.finalize())
}

/// Lower bound `λ >= 2n / deg_x P` from comparing degrees on both sides of
/// the Monge-Ampère identity (`deg_z = 2 deg_x`).
pub fn degree_bound_lambda(spec: &PotentialSpec) -> Rational {
    Rational::new(BigInt::from(2 * spec.dim() as i64), BigInt::from(spec.degree() as i64))
}

/// `λ = 2p/q` in lowest terms; `None` unless λ > 0.
pub fn einstein_pq(lambda: &Rational) -> Option<(BigInt, BigInt)> {
    if !lambda.is_positive() {
        return None;
    }
    let half = lambda / Rational::from_integer(2.into());
    let g = half.numer().gcd(half.denom());
    debug_assert!(!g.is_zero());
    Some((half.numer().clone(), half.denom().clone()))
}
