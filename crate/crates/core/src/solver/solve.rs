use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::univariate::UPoly;
use super::{ConstraintSystem, Equation};
use crate::exactalg::{format_rational, Monomial, MultiIndex, VarId};
use crate::{Poly, Rational};

/// Values for every unknown of a system, the Einstein constant included.
pub type Assignment = BTreeMap<VarId, Rational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SolveStatus {
    Solved,
    Infeasible,
    Unresolved,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Solved => "SOLVED",
            SolveStatus::Infeasible => "INFEASIBLE",
            SolveStatus::Unresolved => "UNRESOLVED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// The equation reduced to a nonzero constant.
    NonzeroConstant,
    /// All terms share one sign while every unknown in it must be positive.
    SignDefinite,
    /// A positive unknown was forced to this non-positive value or expression.
    NotPositive(VarId),
}

/// Why a branch is impossible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Residual monomial the equation came from, if any.
    pub source: Option<MultiIndex>,
    pub poly: Poly,
    pub kind: WitnessKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnresolvedReason {
    /// Unknowns remain with no equation left to fix them.
    Underdetermined,
    /// Only multivariate nonlinear equations remain.
    Nonlinear,
    /// A univariate equation has admissible real roots that are not rational.
    IrrationalRoots,
    /// Rational root search gave up on very large coefficients.
    Unfactorable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Remnant {
    pub reason: UnresolvedReason,
    pub equations: Vec<Equation>,
    pub free: Vec<VarId>,
    pub bindings: Vec<(VarId, Poly)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub solutions: Vec<Assignment>,
    pub witness: Option<Witness>,
    pub remnant: Option<Remnant>,
}

enum BranchResult {
    Solved(Assignment),
    Infeasible(Witness),
    Unresolved(Remnant),
}

#[derive(Clone)]
struct Branch {
    eqs: Vec<Equation>,
    bindings: Vec<(VarId, Poly)>,
    positive: BTreeSet<VarId>,
    free: BTreeSet<VarId>,
}

/// Sign of `p` when all its unknowns are positive, if that sign is forced.
fn forced_sign(p: &Poly, positive: &BTreeSet<VarId>, free: &BTreeSet<VarId>) -> Option<i32> {
    if p.is_zero() {
        return Some(0);
    }
    if !p.vars().iter().all(|v| positive.contains(v) && free.contains(v)) {
        return None;
    }
    let mut sign = 0;
    for (_, c) in p.terms() {
        let s = if c.is_positive() { 1 } else { -1 };
        if sign == 0 {
            sign = s;
        } else if sign != s {
            return None;
        }
    }
    Some(sign)
}

/// Divides out powers of positive unknowns common to every term.
fn strip_positive_content(p: &Poly, positive: &BTreeSet<VarId>, free: &BTreeSet<VarId>) -> Poly {
    let mut common: Option<BTreeMap<VarId, u32>> = None;
    for (m, _) in p.terms() {
        let here: BTreeMap<VarId, u32> = m
            .factors()
            .iter()
            .filter(|(v, _)| positive.contains(v) && free.contains(v))
            .copied()
            .collect();
        common = Some(match common {
            None => here,
            Some(c) => c
                .into_iter()
                .filter_map(|(v, e)| here.get(&v).map(|&f| (v, e.min(f))))
                .collect(),
        });
    }
    let common = common.unwrap_or_default();
    if common.is_empty() {
        return p.clone();
    }
    Poly::from_terms(p.terms().map(|(m, c)| {
        let mut f: Vec<(VarId, u32)> = m.factors().to_vec();
        for (v, e) in f.iter_mut() {
            if let Some(k) = common.get(v) {
                *e -= k;
            }
        }
        let mono = f
            .into_iter()
            .filter(|(_, e)| *e > 0)
            .fold(Monomial::one(), |acc, (v, e)| {
                (0..e).fold(acc, |a, _| a.mul(&Monomial::var(v)))
            });
        (mono, c.clone())
    }))
}

impl Branch {
    fn substitute(&mut self, v: VarId, value: &Poly) {
        for e in &mut self.eqs {
            e.poly = e.poly.substitute(v, value);
        }
        for (_, b) in &mut self.bindings {
            *b = b.substitute(v, value);
        }
        self.bindings.push((v, value.clone()));
        self.free.remove(&v);
    }

    fn drop_trivial(&mut self) {
        let mut seen = std::collections::HashSet::new();
        self.eqs.retain(|e| !e.poly.is_zero() && seen.insert(normalized(&e.poly)));
    }

    /// Cancels common positive factors; run after `contradiction` so that
    /// witnesses show the equation as it was.
    fn strip(&mut self) {
        let (positive, free) = (&self.positive, &self.free);
        for e in &mut self.eqs {
            e.poly = strip_positive_content(&e.poly, positive, free);
        }
        self.drop_trivial();
    }

    fn contradiction(&self) -> Option<Witness> {
        for e in &self.eqs {
            if e.poly.as_constant().is_some() {
                return Some(Witness {
                    source: Some(e.monomial.clone()),
                    poly: e.poly.clone(),
                    kind: WitnessKind::NonzeroConstant,
                });
            }
        }
        for e in &self.eqs {
            if matches!(forced_sign(&e.poly, &self.positive, &self.free), Some(s) if s != 0) {
                return Some(Witness {
                    source: Some(e.monomial.clone()),
                    poly: e.poly.clone(),
                    kind: WitnessKind::SignDefinite,
                });
            }
        }
        for (v, expr) in &self.bindings {
            if !self.positive.contains(v) {
                continue;
            }
            if matches!(forced_sign(expr, &self.positive, &self.free), Some(s) if s <= 0) {
                return Some(Witness { source: None, poly: expr.clone(), kind: WitnessKind::NotPositive(*v) });
            }
        }
        None
    }

    /// An equation `c*v + rest` with `c` a nonzero constant and `rest` free of `v`.
    fn pivot(&self) -> Option<(usize, VarId)> {
        let linear = |e: &Equation, v: VarId| {
            e.poly.degree_in(v) == 1 && e.poly.coefficients_in(v)[1].as_constant().is_some()
        };
        if self.free.contains(&VarId::LAMBDA) {
            if let Some(i) = self.eqs.iter().position(|e| linear(e, VarId::LAMBDA)) {
                return Some((i, VarId::LAMBDA));
            }
        }
        for (i, e) in self.eqs.iter().enumerate() {
            if let Some(&v) = e.poly.vars().iter().rev().find(|&&v| linear(e, v)) {
                return Some((i, v));
            }
        }
        None
    }

    fn remnant(&self, reason: UnresolvedReason) -> Remnant {
        Remnant {
            reason,
            equations: self.eqs.clone(),
            free: self.free.iter().copied().collect(),
            bindings: self.bindings.clone(),
        }
    }

    fn run(mut self, out: &mut Vec<BranchResult>) {
        loop {
            self.drop_trivial();
            if let Some(w) = self.contradiction() {
                out.push(BranchResult::Infeasible(w));
                return;
            }
            self.strip();
            let Some((i, v)) = self.pivot() else { break };
            let eq = self.eqs.remove(i);
            let parts = eq.poly.coefficients_in(v);
            let c = parts[1].as_constant().expect("pivot has constant coefficient");
            let value = parts[0].scale(&(-Rational::from_integer(1.into()) / c));
            self.substitute(v, &value);
        }

        if self.eqs.is_empty() {
            if !self.free.is_empty() {
                out.push(BranchResult::Unresolved(self.remnant(UnresolvedReason::Underdetermined)));
                return;
            }
            let assignment = self
                .bindings
                .iter()
                .map(|(v, e)| (*v, e.as_constant().expect("fully determined")))
                .collect();
            out.push(BranchResult::Solved(assignment));
            return;
        }

        let univariate = self.eqs.iter().position(|e| e.poly.vars().len() == 1);
        let Some(i) = univariate else {
            self.eliminate(out);
            return;
        };
        let v = self.eqs[i].poly.vars()[0];
        let to_upoly = |p: &Poly| {
            UPoly::new(p.coefficients_in(v).iter().map(|c| c.as_constant().expect("univariate")).collect())
        };
        let upoly = self
            .eqs
            .iter()
            .filter(|e| e.poly.vars() == [v])
            .fold(UPoly::new(Vec::new()), |g, e| g.gcd(&to_upoly(&e.poly)));
        let positive = self.positive.contains(&v);
        let Some((roots, rest)) = upoly.rational_roots() else {
            out.push(BranchResult::Unresolved(self.remnant(UnresolvedReason::Unfactorable)));
            return;
        };
        let admissible: Vec<Rational> =
            roots.into_iter().filter(|r| !positive || r.is_positive()).collect();
        let irrational = rest.count_real_roots(positive) > 0;
        if irrational {
            out.push(BranchResult::Unresolved(self.remnant(UnresolvedReason::IrrationalRoots)));
        }
        if admissible.is_empty() && !irrational {
            out.push(BranchResult::Infeasible(Witness {
                source: Some(self.eqs[i].monomial.clone()),
                poly: self.eqs[i].poly.clone(),
                kind: if positive { WitnessKind::NotPositive(v) } else { WitnessKind::NonzeroConstant },
            }));
            return;
        }
        for r in admissible {
            let mut b = self.clone();
            b.substitute(v, &Poly::constant(r));
            b.run(out);
        }
    }

    /// Unknown to eliminate next: lowest maximal degree, then highest id.
    fn elimination_var(&self) -> Option<VarId> {
        let vars: BTreeSet<VarId> = self.eqs.iter().flat_map(|e| e.poly.vars()).collect();
        vars.into_iter().rev().min_by_key(|&v| {
            self.eqs.iter().map(|e| e.poly.degree_in(v)).max().unwrap_or(0)
        })
    }

    /// Projects the system along one unknown with resultants, solves the
    /// projection, and lifts each of its solutions back into this branch.
    fn eliminate(&self, out: &mut Vec<BranchResult>) {
        let Some(v) = self.elimination_var() else {
            out.push(BranchResult::Unresolved(self.remnant(UnresolvedReason::Nonlinear)));
            return;
        };
        let (with, without): (Vec<&Equation>, Vec<&Equation>) =
            self.eqs.iter().partition(|e| e.poly.contains_var(v));
        let base = with
            .iter()
            .min_by_key(|e| (e.poly.degree_in(v), e.poly.terms().count()))
            .copied()
            .expect("v occurs in some equation");
        let mut projected: Vec<Equation> = without.into_iter().cloned().collect();
        for e in with.iter().filter(|e| !std::ptr::eq(**e, base)) {
            let r = resultant(&base.poly, &e.poly, v);
            if !r.is_zero() {
                projected.push(Equation { monomial: e.monomial.clone(), poly: r });
            }
        }
        let mut free = self.free.clone();
        free.remove(&v);
        let child = Branch { eqs: projected, bindings: Vec::new(), positive: self.positive.clone(), free };
        let mut inner = Vec::new();
        child.run(&mut inner);

        let mut witness = None;
        let mut lifted = false;
        for r in inner {
            match r {
                BranchResult::Solved(a) => {
                    lifted = true;
                    let mut b = self.clone();
                    for (w, value) in a {
                        b.substitute(w, &Poly::constant(value));
                    }
                    b.run(out);
                }
                BranchResult::Infeasible(w) => {
                    witness.get_or_insert(w);
                }
                BranchResult::Unresolved(rem) => {
                    lifted = true;
                    out.push(BranchResult::Unresolved(self.remnant(rem.reason)));
                }
            }
        }
        if !lifted {
            out.push(BranchResult::Infeasible(witness.unwrap_or(Witness {
                source: Some(base.monomial.clone()),
                poly: base.poly.clone(),
                kind: WitnessKind::NonzeroConstant,
            })));
        }
    }
}

/// Determinant by expansion over column subsets, without division.
fn poly_determinant(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    // minors[s]: determinant of rows 0..|s| restricted to the columns in s
    let mut minors: Vec<Option<Poly>> = vec![None; 1 << n];
    minors[0] = Some(Poly::one());
    for s in 1usize..(1 << n) {
        let row = s.count_ones() as usize - 1;
        let mut acc = Poly::zero();
        for j in 0..n {
            if s & (1 << j) == 0 || m[row][j].is_zero() {
                continue;
            }
            let rest = s & !(1 << j);
            let Some(minor) = &minors[rest] else { continue };
            if minor.is_zero() {
                continue;
            }
            let term = &m[row][j] * minor;
            // columns of `rest` to the right of j
            if (rest >> (j + 1)).count_ones() % 2 == 1 {
                acc = &acc - &term;
            } else {
                acc = &acc + &term;
            }
        }
        minors[s] = Some(acc);
    }
    minors[(1 << n) - 1].take().expect("full minor")
}

/// Sylvester resultant of `f` and `g` with respect to `v`.
pub(crate) fn resultant(f: &Poly, g: &Poly, v: VarId) -> Poly {
    let fc = f.coefficients_in(v);
    let gc = g.coefficients_in(v);
    let (m, n) = (fc.len() - 1, gc.len() - 1);
    let size = m + n;
    if size == 0 {
        return Poly::one();
    }
    let mut rows = vec![vec![Poly::zero(); size]; size];
    for i in 0..n {
        for (k, c) in fc.iter().rev().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in gc.iter().rev().enumerate() {
            rows[n + i][i + k] = c.clone();
        }
    }
    poly_determinant(&rows)
}

/// Scaled so the leading coefficient is 1; used to drop duplicate equations.
fn normalized(p: &Poly) -> Poly {
    match p.terms().last() {
        Some((_, c)) if !c.is_zero() => p.scale(&(Rational::from_integer(1.into()) / c.clone())),
        _ => p.clone(),
    }
}

/// Solves a constraint system over the rationals.
///
/// 1. Unknowns occurring linearly with a constant coefficient are eliminated,
///    the Einstein constant first.
/// 2. Support coefficients are taken strictly positive (a zero coefficient is
///    a smaller support, examined on its own), so common positive factors are
///    cancelled and sign-definite equations are contradictions.
/// 3. A remaining univariate equation branches over its rational roots.
/// 4. Anything else is returned as an unresolved remnant.
pub fn solve_system(sys: &ConstraintSystem) -> SolveOutcome {
    let branch = Branch {
        eqs: sys.equations.clone(),
        bindings: Vec::new(),
        positive: sys.positivity.iter().copied().collect(),
        free: sys.unknowns.iter().map(|u| u.id).collect(),
    };
    let mut results = Vec::new();
    branch.run(&mut results);

    let mut solutions: Vec<Assignment> = Vec::new();
    let mut witness = None;
    let mut remnant = None;
    for r in results {
        match r {
            BranchResult::Solved(a) => {
                if !solutions.contains(&a) {
                    solutions.push(a);
                }
            }
            BranchResult::Infeasible(w) => {
                witness.get_or_insert(w);
            }
            BranchResult::Unresolved(rem) => {
                remnant.get_or_insert(rem);
            }
        }
    }
    solutions.sort_by(|a, b| a.values().cmp(b.values()));
    let status = if remnant.is_some() {
        SolveStatus::Unresolved
    } else if !solutions.is_empty() {
        SolveStatus::Solved
    } else {
        SolveStatus::Infeasible
    };
    if status != SolveStatus::Infeasible {
        witness = None;
    }
    SolveOutcome { status, solutions, witness, remnant }
}

impl SolveOutcome {
    pub fn lambda_values(&self) -> Vec<Rational> {
        self.solutions.iter().filter_map(|a| a.get(&VarId::LAMBDA).cloned()).collect()
    }
}

/// `name = value` listing of an assignment.
pub fn render_assignment(a: &Assignment, name: impl Fn(VarId) -> String) -> Vec<String> {
    a.iter().map(|(v, r)| format!("{} = {}", name(*v), format_rational(r))).collect()
}
