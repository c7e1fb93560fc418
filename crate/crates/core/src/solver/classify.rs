use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use super::SolverError;
use crate::exactalg::{MultiIndex, Series};
use crate::geometry::{build_potential, einstein_pq, PotentialSpec};
use crate::{Poly, Rational, XSeries};

/// Model spaces a classified potential can be recognised as.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelTag {
    /// `(CP^n, g_FS)`, potential `1 + sum x`.
    CpnUnit,
    /// `(CP^n, q g_FS)`, potential `(1 + sum x / q)^q`.
    CpnScaled(u32),
    /// A product of scaled projective spaces over a partition of the variables.
    ProductOfLines,
    Unknown,
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelTag::CpnUnit => write!(f, "CPn_unit"),
            ModelTag::CpnScaled(q) => write!(f, "CPn_scaled({q})"),
            ModelTag::ProductOfLines => write!(f, "ProductOfLines"),
            ModelTag::Unknown => write!(f, "UNKNOWN"),
        }
    }
}

impl Serialize for ModelTag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `(1 + (x_{vars}) / q)^q` in the ambient ring.
fn scaled_block(n: usize, vars: &[usize], q: u32, t: u32) -> XSeries {
    let inv = Rational::new(BigInt::one(), BigInt::from(q));
    let mut base = Series::one(n, t);
    for &a in vars {
        base.add_term(MultiIndex::unit(n, a), Poly::constant(inv.clone()));
    }
    base.pow(q)
}

/// `P` with every variable outside `vars` set to zero.
fn restrict(p: &XSeries, vars: &[usize]) -> XSeries {
    let mut out = Series::zero(p.dim(), p.truncation());
    for (m, c) in p.terms() {
        if m.support().all(|a| vars.contains(&a)) {
            out.add_term(m.clone(), c.clone());
        }
    }
    out
}

fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            rec(i + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        rec(i + 1, n, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

/// Recognises the potential itself, up to relabelling of variables.
pub fn match_model_potential(spec: &PotentialSpec) -> Result<ModelTag, SolverError> {
    if spec.is_symbolic() {
        return Err(SolverError::Geometry(crate::geometry::GeometryError::Symbolic));
    }
    let n = spec.dim();
    let deg = spec.degree();
    let p = build_potential(spec, deg)?;
    let all: Vec<usize> = (0..n).collect();
    if p == scaled_block(n, &all, deg, deg) {
        return Ok(if deg == 1 { ModelTag::CpnUnit } else { ModelTag::CpnScaled(deg) });
    }
    if n >= 2 && n <= 8 {
        for part in set_partitions(n).into_iter().filter(|b| b.len() >= 2) {
            let mut prod = Series::one(n, deg);
            let mut ok = true;
            for block in &part {
                let pb = restrict(&p, block);
                let q = pb.degree();
                if q == 0 || pb != scaled_block(n, block, q, deg) {
                    ok = false;
                    break;
                }
                prod = &prod * &pb;
            }
            if ok && prod == p {
                return Ok(ModelTag::ProductOfLines);
            }
        }
    }
    Ok(ModelTag::Unknown)
}

/// Model space read off from the Einstein constant alone: with `λ = 2p/q`
/// in lowest terms, `p = n + 1` means `(CP^n, q g_FS)` and `n = p = 2`
/// means `CP^1 x CP^1`. `p > n + 1` is impossible for an induced metric.
pub fn constant_shortcut(n: usize, lambda: &Rational) -> Result<Option<ModelTag>, SolverError> {
    let (p, q) = einstein_pq(lambda).ok_or_else(|| SolverError::Classification(format!(
        "non-positive Einstein constant {lambda}"
    )))?;
    let n1 = BigInt::from(n + 1);
    if p > n1 {
        return Err(SolverError::Classification(format!(
            "λ = {lambda} gives p = {p} > n + 1 = {n1}"
        )));
    }
    if p == n1 {
        let q = q.to_u32().ok_or_else(|| SolverError::Classification("q too large".into()))?;
        return Ok(Some(if q == 1 { ModelTag::CpnUnit } else { ModelTag::CpnScaled(q) }));
    }
    if n == 2 && p == BigInt::from(2) {
        return Ok(Some(ModelTag::ProductOfLines));
    }
    Ok(None)
}

/// Tags a certified Einstein potential. The potential match is authoritative;
/// the Einstein-constant shortcut must agree with it whenever it applies.
pub fn classify(spec: &PotentialSpec, lambda: &Rational) -> Result<ModelTag, SolverError> {
    let matched = match_model_potential(spec)?;
    if let Some(expected) = constant_shortcut(spec.dim(), lambda)? {
        if expected != matched {
            return Err(SolverError::Classification(format!(
                "potential {spec} matches {matched} but λ = {lambda} implies {expected}"
            )));
        }
    }
    Ok(matched)
}
