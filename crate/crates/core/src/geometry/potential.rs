use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::GeometryError;
use crate::exactalg::{format_rational, MultiIndex, Series, VarId};
use crate::{Poly, Rational, XSeries};

/// What a symbolic unknown stands for.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnknownRole {
    SupportCoefficient(MultiIndex),
    EinsteinConstant,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unknown {
    pub id: VarId,
    pub name: String,
    pub role: UnknownRole,
}

impl Unknown {
    pub fn lambda() -> Self {
        Unknown { id: VarId::LAMBDA, name: "lambda".into(), role: UnknownRole::EinsteinConstant }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coef {
    Value(Rational),
    Symbol(String),
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Value(r) => write!(f, "{}", format_rational(r)),
            Coef::Symbol(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SupportTerm {
    pub index: MultiIndex,
    pub coef: Coef,
}

/// A potential in Bochner form,
/// `P = 1 + x_1 + ... + x_n + sum_j a_j x^{m_j}`, with `|m_j| >= 2`.
///
/// The diastasis is `log P`; the support size is the codimension of the
/// induced immersion. Support terms are kept sorted and pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PotentialSpec {
    dim: usize,
    support: Vec<SupportTerm>,
}

impl PotentialSpec {
    pub fn new(dim: usize, support: Vec<SupportTerm>) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::InvalidSupport("dimension must be positive".into()));
        }
        let mut support = support;
        support.sort_by(|a, b| a.index.cmp(&b.index));
        let mut names = BTreeSet::new();
        for (i, t) in support.iter().enumerate() {
            if t.index.dim() != dim {
                return Err(GeometryError::InvalidSupport(format!(
                    "monomial {:?} has length {}, expected {dim}",
                    t.index,
                    t.index.dim()
                )));
            }
            if t.index.degree() < 2 {
                return Err(GeometryError::InvalidSupport(format!(
                    "support monomial {} has degree below 2",
                    t.index
                )));
            }
            if i > 0 && support[i - 1].index == t.index {
                return Err(GeometryError::DuplicateSupport(t.index.clone()));
            }
            match &t.coef {
                Coef::Symbol(s) => {
                    if s.is_empty() || s == "lambda" || !names.insert(s.clone()) {
                        return Err(GeometryError::DuplicateSymbol(s.clone()));
                    }
                }
                Coef::Value(v) if v.is_zero() => {
                    return Err(GeometryError::InvalidSupport(format!(
                        "support monomial {} has zero coefficient",
                        t.index
                    )));
                }
                Coef::Value(_) => {}
            }
        }
        Ok(PotentialSpec { dim, support })
    }

    /// Totally geodesic `P = 1 + sum x`.
    pub fn flat(dim: usize) -> Self {
        PotentialSpec { dim, support: Vec::new() }
    }

    pub fn numeric(
        dim: usize,
        terms: impl IntoIterator<Item = (MultiIndex, Rational)>,
    ) -> Result<Self, GeometryError> {
        Self::new(
            dim,
            terms
                .into_iter()
                .map(|(index, c)| SupportTerm { index, coef: Coef::Value(c) })
                .collect(),
        )
    }

    /// All coefficients symbolic, named after the monomial (see [`default_name`]).
    pub fn symbolic(
        dim: usize,
        indices: impl IntoIterator<Item = MultiIndex>,
    ) -> Result<Self, GeometryError> {
        Self::new(
            dim,
            indices
                .into_iter()
                .map(|index| SupportTerm { coef: Coef::Symbol(default_name(&index)), index })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[SupportTerm] {
        &self.support
    }

    pub fn codimension(&self) -> usize {
        self.support.len()
    }

    /// Degree of `P` in `x` (half its degree in `z, z̄`).
    pub fn degree(&self) -> u32 {
        self.support.iter().map(|t| t.index.degree()).max().unwrap_or(1).max(1)
    }

    pub fn is_numeric(&self) -> bool {
        self.support.iter().all(|t| matches!(t.coef, Coef::Value(_)))
    }

    pub fn is_symbolic(&self) -> bool {
        !self.is_numeric()
    }

    /// `true` if every numeric coefficient is positive, as required for an
    /// induced potential.
    pub fn has_positive_coefficients(&self) -> bool {
        self.support.iter().all(|t| match &t.coef {
            Coef::Value(v) => v.is_positive(),
            Coef::Symbol(_) => true,
        })
    }

    /// The unknowns of this spec: the Einstein constant (id 0) followed by
    /// one unknown per symbolic support term, numbered in support order.
    pub fn unknowns(&self) -> Vec<Unknown> {
        let mut out = vec![Unknown::lambda()];
        let mut next = 1;
        for t in &self.support {
            if let Coef::Symbol(name) = &t.coef {
                out.push(Unknown {
                    id: VarId(next),
                    name: name.clone(),
                    role: UnknownRole::SupportCoefficient(t.index.clone()),
                });
                next += 1;
            }
        }
        out
    }

    /// Coefficient of each support term as a polynomial in the unknowns.
    pub fn support_polys(&self) -> Vec<(MultiIndex, Poly)> {
        let mut next = 1;
        self.support
            .iter()
            .map(|t| {
                let p = match &t.coef {
                    Coef::Value(v) => Poly::constant(v.clone()),
                    Coef::Symbol(_) => {
                        let p = Poly::var(VarId(next));
                        next += 1;
                        p
                    }
                };
                (t.index.clone(), p)
            })
            .collect()
    }

    /// Replaces symbolic coefficients by values; unassigned symbols stay.
    pub fn assign(&self, values: &BTreeMap<VarId, Rational>) -> Result<Self, GeometryError> {
        let unknowns = self.unknowns();
        let by_name: BTreeMap<&str, VarId> =
            unknowns.iter().map(|u| (u.name.as_str(), u.id)).collect();
        let support = self
            .support
            .iter()
            .map(|t| match &t.coef {
                Coef::Symbol(s) => match values.get(&by_name[s.as_str()]) {
                    Some(v) => SupportTerm { index: t.index.clone(), coef: Coef::Value(v.clone()) },
                    None => t.clone(),
                },
                Coef::Value(_) => t.clone(),
            })
            .collect();
        Self::new(self.dim, support)
    }

    /// Relabels variables (`x_i` becomes `x_{perm[i]}`), renaming default
    /// symbol names accordingly.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let support = self
            .support
            .iter()
            .map(|t| {
                let index = t.index.permute(perm);
                let coef = match &t.coef {
                    Coef::Symbol(s) if *s == default_name(&t.index) => {
                        Coef::Symbol(default_name(&index))
                    }
                    c => c.clone(),
                };
                SupportTerm { index, coef }
            })
            .collect();
        Self::new(self.dim, support).expect("permutation preserves validity")
    }

    /// Support monomials only.
    pub fn indices(&self) -> Vec<MultiIndex> {
        self.support.iter().map(|t| t.index.clone()).collect()
    }
}

impl fmt::Display for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1")?;
        for i in 0..self.dim {
            write!(f, " + x{}", i + 1)?;
        }
        for t in &self.support {
            match &t.coef {
                Coef::Value(v) if v.is_one() => write!(f, " + {}", t.index)?,
                c => write!(f, " + {c}*{}", t.index)?,
            }
        }
        Ok(())
    }
}

/// Conventional name of the unknown coefficient of `x^m`: `a1` for `x1^2`,
/// `b12` for `x1*x2`, `c1` for `x1^3`, `d12` for `x1*x2^2`, `e123` for
/// `x1*x2*x3`; anything else is `u` followed by the exponents.
pub fn default_name(m: &MultiIndex) -> String {
    let sep = if m.dim() > 9 { "_" } else { "" };
    let vars: Vec<usize> = m.support().collect();
    let join = |ids: &[usize]| {
        ids.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(sep)
    };
    let prefix = if sep.is_empty() { "" } else { "_" };
    match (m.degree(), vars.as_slice()) {
        (2, [j]) => format!("a{prefix}{}", join(&[*j])),
        (2, [j, k]) => format!("b{prefix}{}", join(&[*j, *k])),
        (3, [j]) => format!("c{prefix}{}", join(&[*j])),
        (3, [j, k]) if m.get(*k) == 2 => format!("d{prefix}{}", join(&[*j, *k])),
        (3, [j, k]) => format!("d{prefix}{}", join(&[*k, *j])),
        (3, [i, j, k]) => format!("e{prefix}{}", join(&[*i, *j, *k])),
        _ => format!(
            "u_{}",
            m.exponents().iter().map(|e| e.to_string()).collect::<Vec<_>>().join("_")
        ),
    }
}

/// `P = 1 + sum x_a + sum_j a_j x^{m_j}` as a series truncated at `truncation`.
pub fn build_potential(spec: &PotentialSpec, truncation: u32) -> Result<XSeries, GeometryError> {
    let needed = spec.support.iter().map(|t| t.index.degree()).max().unwrap_or(1);
    if truncation < needed {
        return Err(GeometryError::TruncationTooLow { needed, got: truncation });
    }
    let n = spec.dim;
    let mut p = Series::one(n, truncation);
    for a in 0..n {
        p.add_term(MultiIndex::unit(n, a), Poly::one());
    }
    for (m, c) in spec.support_polys() {
        p.add_term(m, c);
    }
    Ok(p)
}
