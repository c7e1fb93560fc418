use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::SolverError;
use crate::exactalg::{MultiIndex, VarId};
use crate::geometry::{build_potential, ma_log_residual, PotentialSpec, Unknown, UnknownRole};
use crate::Poly;

/// One coefficient of the Monge-Ampère residual, required to vanish.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    /// The `x`-monomial whose coefficient this is.
    pub monomial: MultiIndex,
    pub poly: Poly,
}

/// Polynomial equations in the unknowns of a symbolic potential, together
/// with the unknowns required to be strictly positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub dim: usize,
    pub unknowns: Vec<Unknown>,
    pub equations: Vec<Equation>,
    pub positivity: Vec<VarId>,
}

impl ConstraintSystem {
    pub fn name_of(&self, v: VarId) -> String {
        self.unknowns
            .iter()
            .find(|u| u.id == v)
            .map(|u| u.name.clone())
            .unwrap_or_else(|| format!("u{}", v.0))
    }

    pub fn names(&self) -> BTreeMap<VarId, String> {
        self.unknowns.iter().map(|u| (u.id, u.name.clone())).collect()
    }

    pub fn render_poly(&self, p: &Poly) -> String {
        let names = self.names();
        let f = move |v: VarId| names.get(&v).cloned().unwrap_or_else(|| format!("u{}", v.0));
        p.display_with(&f).to_string()
    }

    /// Equations whose monomial has the given `x`-degree.
    pub fn block(&self, degree: u32) -> impl Iterator<Item = &Equation> {
        self.equations.iter().filter(move |e| e.monomial.degree() == degree)
    }

    /// Replaces an unknown by a polynomial in every equation.
    pub fn substitute(&self, v: VarId, value: &Poly) -> ConstraintSystem {
        let equations = self
            .equations
            .iter()
            .map(|e| Equation { monomial: e.monomial.clone(), poly: e.poly.substitute(v, value) })
            .filter(|e| !e.poly.is_zero())
            .collect();
        ConstraintSystem {
            dim: self.dim,
            unknowns: self.unknowns.iter().filter(|u| u.id != v).cloned().collect(),
            equations,
            positivity: self.positivity.iter().copied().filter(|&p| p != v).collect(),
        }
    }

    pub fn lambda_unknown(&self) -> Option<&Unknown> {
        self.unknowns.iter().find(|u| u.role == UnknownRole::EinsteinConstant)
    }
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.equations {
            writeln!(f, "[{}] {} = 0", e.monomial, self.render_poly(&e.poly))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquationRecord {
    pub monomial: Vec<u16>,
    pub degree: u32,
    pub equation: String,
}

/// Rendered form of a system, for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemRecord {
    pub n: usize,
    pub unknowns: Vec<String>,
    pub positive: Vec<String>,
    pub equations: Vec<EquationRecord>,
}

impl ConstraintSystem {
    pub fn record(&self) -> SystemRecord {
        SystemRecord {
            n: self.dim,
            unknowns: self.unknowns.iter().map(|u| u.name.clone()).collect(),
            positive: self.positivity.iter().map(|&v| self.name_of(v)).collect(),
            equations: self
                .equations
                .iter()
                .map(|e| EquationRecord {
                    monomial: e.monomial.exponents().to_vec(),
                    degree: e.monomial.degree(),
                    equation: format!("{} = 0", self.render_poly(&e.poly)),
                })
                .collect(),
        }
    }
}

/// Residual coefficients through degree `truncation` as equations, with no
/// check on how the truncation relates to the support.
pub(crate) fn residual_system(
    spec: &PotentialSpec,
    truncation: u32,
) -> Result<ConstraintSystem, SolverError> {
    let p = build_potential(spec, spec.degree())?;
    let r = ma_log_residual(&p, &Poly::var(VarId::LAMBDA), truncation)?;
    let unknowns = spec.unknowns();
    let positivity = unknowns
        .iter()
        .filter(|u| matches!(u.role, UnknownRole::SupportCoefficient(_)))
        .map(|u| u.id)
        .collect();
    let equations = r
        .terms()
        .map(|(m, c)| Equation { monomial: m.clone(), poly: c.clone() })
        .collect();
    Ok(ConstraintSystem { dim: spec.dim(), unknowns, equations, positivity })
}

/// Every `x`-coefficient of `log det g + (λ/2) log P` through degree
/// `truncation`, with `λ` symbolic, as an equation. Equations come out in
/// graded monomial order; the degree-1 block is the system
/// `4 a_h + sum_k b_hk - (n + 1) + λ/2 = 0`.
pub fn extract_constraints(
    spec: &PotentialSpec,
    truncation: u32,
) -> Result<ConstraintSystem, SolverError> {
    let needed = spec.degree() + 1;
    if truncation < needed {
        return Err(SolverError::TruncationTooLow { needed, got: truncation });
    }
    residual_system(spec, truncation)
}
