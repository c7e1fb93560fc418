use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::*;
use crate::exactalg::{Monomial, MultiIndex, VarId};
use crate::geometry::{PotentialSpec, Unknown, UnknownRole};
use crate::{Poly, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn idx(e: &[u16]) -> MultiIndex {
    MultiIndex::new(e.iter().copied())
}

fn var_named(sys: &ConstraintSystem, name: &str) -> Poly {
    let u = sys.unknowns.iter().find(|u| u.name == name).unwrap_or_else(|| panic!("{name}"));
    Poly::var(u.id)
}

fn lambda() -> Poly {
    Poly::var(VarId::LAMBDA)
}

/// All monomials of degree 2 in `n` variables, symbolic.
fn quadratic_spec(n: usize) -> PotentialSpec {
    PotentialSpec::symbolic(n, MultiIndex::all_of_degree(n, 2)).unwrap()
}

#[test]
fn first_order_block_is_the_linear_system() {
    for n in 1..=6 {
        let spec = quadratic_spec(n);
        let sys = extract_constraints(&spec, 3).unwrap();
        let block: Vec<&Equation> = sys.block(1).collect();
        assert_eq!(block.len(), n);
        for (h, e) in block.iter().enumerate() {
            assert_eq!(e.monomial, MultiIndex::unit(n, h));
            // 4 a_h + sum_k b_hk - (n + 1) + λ/2
            let mut expected = var_named(&sys, &format!("a{}", h + 1)).scale(&q(4, 1));
            for k in 0..n {
                if k != h {
                    let (i, j) = (h.min(k) + 1, h.max(k) + 1);
                    expected = &expected + &var_named(&sys, &format!("b{i}{j}"));
                }
            }
            expected = &expected + &Poly::constant(q(-(n as i64 + 1), 1));
            expected = &expected + &lambda().scale(&q(1, 2));
            assert_eq!(e.poly, expected, "n = {n}, h = {h}");
        }
    }
}

#[test]
fn first_order_block_displays_as_expected() {
    let sys = extract_constraints(&quadratic_spec(2), 3).unwrap();
    let lines: Vec<String> = sys.block(1).map(|e| sys.render_poly(&e.poly)).collect();
    assert_eq!(lines, ["1/2*lambda + 4*a1 + b12 - 3", "1/2*lambda + b12 + 4*a2 - 3"]);
    let sys4 = extract_constraints(&quadratic_spec(4), 3).unwrap();
    let first = sys4.render_poly(&sys4.block(1).next().unwrap().poly);
    assert_eq!(first, "1/2*lambda + 4*a1 + b12 + b13 + b14 - 5");
}

#[test]
fn extraction_needs_room_above_the_support() {
    let spec = quadratic_spec(2);
    assert!(matches!(
        extract_constraints(&spec, 2),
        Err(SolverError::TruncationTooLow { needed: 3, got: 2 })
    ));
    let sys = extract_constraints(&spec, 3).unwrap();
    assert!(sys.equations.iter().all(|e| e.poly.vars().iter().all(|v| sys.unknowns.iter().any(|u| u.id == *v))));
    assert!(sys.block(1).any(|e| e.poly.contains_var(VarId::LAMBDA)));
    // graded order
    let degs: Vec<u32> = sys.equations.iter().map(|e| e.monomial.degree()).collect();
    assert!(degs.windows(2).all(|w| w[0] <= w[1]));
}

/// Row reduction over the monomials of the unknowns.
fn in_span(target: &Poly, basis: &[Poly]) -> bool {
    let mut rows: Vec<BTreeMap<Monomial, Rational>> = Vec::new();
    let reduce = |rows: &Vec<BTreeMap<Monomial, Rational>>, p: &Poly| {
        let mut v: BTreeMap<Monomial, Rational> =
            p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        for r in rows {
            let (pm, pc) = r.iter().next().unwrap();
            if let Some(c) = v.get(pm).cloned() {
                let f = c / pc;
                for (m, rc) in r {
                    let e = v.entry(m.clone()).or_insert_with(Rational::zero);
                    *e -= &f * rc;
                }
                v.retain(|_, c| !c.is_zero());
            }
        }
        v
    };
    for b in basis {
        let v = reduce(&rows, b);
        if !v.is_empty() {
            rows.push(v);
        }
    }
    reduce(&rows, target).is_empty()
}

#[test]
fn cubic_block_ties_mixed_to_pure_coefficients() {
    let cubic = MultiIndex::all_of_degree(2, 3);
    let mut support = vec![idx(&[1, 1])];
    support.extend(cubic);
    let spec = PotentialSpec::symbolic(2, support).unwrap();
    let sys = extract_constraints(&spec, 4).unwrap();
    let b12 = var_named(&sys, "b12").vars()[0];
    let value = &Poly::constant(q(3, 1)) - &lambda().scale(&q(1, 2));
    let sys = sys.substitute(b12, &value);
    let block: Vec<Poly> = sys.block(2).map(|e| e.poly.clone()).collect();
    assert_eq!(block.len(), 3);
    let rel1 = &var_named(&sys, "d12") - &var_named(&sys, "c1").scale(&q(9, 1));
    let rel2 = &var_named(&sys, "d21") - &var_named(&sys, "c2").scale(&q(9, 1));
    assert!(in_span(&rel1, &block));
    assert!(in_span(&rel2, &block));
    assert!(!in_span(&var_named(&sys, "d12"), &block));
}

#[test]
fn no_mixed_term_branch_is_infeasible() {
    let mut support = vec![idx(&[2, 0]), idx(&[0, 2])];
    support.extend(MultiIndex::all_of_degree(2, 3));
    let spec = PotentialSpec::symbolic(2, support).unwrap();
    let entry = solve_spec(&spec, 5).unwrap();
    assert_eq!(entry.status, SolveStatus::Infeasible);
    let w = entry.witness.unwrap();
    assert_eq!(w.monomial.as_deref(), Some("x1*x2"));
    assert_eq!(w.equation, "4*a1 + 4*d21 + 4*d12 = 0");
}

#[test]
fn veronese_symbolic_solution_is_unique() {
    let sys = extract_constraints(&quadratic_spec(2), 4).unwrap();
    let out = solve_system(&sys);
    assert_eq!(out.status, SolveStatus::Solved);
    assert_eq!(out.solutions.len(), 1);
    let mut rendered = render_assignment(&out.solutions[0], |v| sys.name_of(v));
    rendered.sort();
    assert_eq!(rendered, ["a1 = 1/4", "a2 = 1/4", "b12 = 1/2", "lambda = 3"]);

    // equation order does not matter
    let mut rev = sys.clone();
    rev.equations.reverse();
    assert_eq!(solve_system(&rev).solutions, out.solutions);
}

#[test]
fn empty_support_gives_fubini_study() {
    for n in 1..=6 {
        let entry = solve_spec(&PotentialSpec::flat(n), 3).unwrap();
        assert_eq!(entry.status, SolveStatus::Solved);
        assert_eq!(entry.solutions.len(), 1);
        let s = &entry.solutions[0];
        assert_eq!(s.lambda_value, q(2 * (n as i64 + 1), 1));
        assert_eq!(s.tag, ModelTag::CpnUnit);
        assert!(s.certificate.passed());
    }
}

#[test]
fn segre_needs_second_order() {
    let spec = PotentialSpec::symbolic(2, vec![idx(&[1, 1])]).unwrap();
    let entry = solve_spec(&spec, 4).unwrap();
    assert_eq!(entry.status, SolveStatus::Solved);
    assert_eq!(entry.decided_at, 2);
    assert_eq!(entry.solutions[0].lambda, "4");
    assert_eq!(entry.solutions[0].tag, ModelTag::ProductOfLines);
}

fn toy(eqs: Vec<Poly>) -> ConstraintSystem {
    let a = Unknown {
        id: VarId(1),
        name: "a".into(),
        role: UnknownRole::SupportCoefficient(idx(&[2])),
    };
    ConstraintSystem {
        dim: 1,
        unknowns: vec![Unknown::lambda(), a],
        equations: eqs
            .into_iter()
            .enumerate()
            .map(|(i, poly)| Equation { monomial: MultiIndex::new([i as u16 + 1]), poly })
            .collect(),
        positivity: vec![VarId(1)],
    }
}

#[test]
fn univariate_branching() {
    let a = Poly::var(VarId(1));
    let a2 = &a * &a;
    let lam_eq = &lambda() - &a;

    let sys = toy(vec![&a2 - &Poly::constant(q(4, 1)), lam_eq.clone()]);
    let out = solve_system(&sys);
    assert_eq!(out.status, SolveStatus::Solved);
    assert_eq!(out.lambda_values(), vec![q(2, 1)]);

    let sys = toy(vec![&a2 - &Poly::constant(q(2, 1)), lam_eq.clone()]);
    let out = solve_system(&sys);
    assert_eq!(out.status, SolveStatus::Unresolved);
    assert_eq!(out.remnant.unwrap().reason, UnresolvedReason::IrrationalRoots);

    let sys = toy(vec![&a2 + &Poly::constant(q(1, 1)), lam_eq.clone()]);
    assert_eq!(solve_system(&sys).status, SolveStatus::Infeasible);

    // only a negative root
    let sys = toy(vec![&a + &Poly::constant(q(3, 1)), lam_eq.clone()]);
    let out = solve_system(&sys);
    assert_eq!(out.status, SolveStatus::Infeasible);
    assert_eq!(out.witness.unwrap().kind, WitnessKind::SignDefinite);

    // a^2 - 3a - 4 = (a - 4)(a + 1), elimination through a second unknown
    let sys = toy(vec![&(&a2 - &a.scale(&q(3, 1))) - &Poly::constant(q(4, 1)), lam_eq]);
    assert_eq!(solve_system(&sys).lambda_values(), vec![q(4, 1)]);
}

#[test]
fn resultant_eliminates() {
    let (v, a, b) = (Poly::var(VarId(3)), Poly::var(VarId(1)), Poly::var(VarId(2)));
    let f = &(&v * &v) - &a;
    let g = &v - &b;
    assert_eq!(super::solve::resultant(&f, &g, VarId(3)), &(&b * &b) - &a);
}

#[test]
fn underdetermined_is_unresolved() {
    let a = Poly::var(VarId(1));
    let sys = toy(vec![&lambda() - &a]);
    let out = solve_system(&sys);
    assert_eq!(out.status, SolveStatus::Unresolved);
    assert_eq!(out.remnant.unwrap().reason, UnresolvedReason::Underdetermined);
}

/// Renames unknowns in a polynomial.
fn rename(p: &Poly, map: &BTreeMap<VarId, VarId>) -> Poly {
    Poly::from_terms(p.terms().map(|(m, c)| {
        let mono = m.factors().iter().fold(Monomial::one(), |acc, (v, e)| {
            (0..*e).fold(acc, |a, _| a.mul(&Monomial::var(map[v])))
        });
        (mono, c.clone())
    }))
}

#[test]
fn permutation_equivariance() {
    let support = vec![idx(&[2, 0, 0]), idx(&[0, 1, 1]), idx(&[1, 0, 2])];
    let spec = PotentialSpec::symbolic(3, support).unwrap();
    for perm in permutations(3) {
        let image = spec.permute(&perm);
        let s1 = extract_constraints(&spec, 4).unwrap();
        let s2 = extract_constraints(&image, 4).unwrap();
        let by_name: BTreeMap<String, VarId> =
            s2.unknowns.iter().map(|u| (u.name.clone(), u.id)).collect();
        let map: BTreeMap<VarId, VarId> = s1
            .unknowns
            .iter()
            .map(|u| {
                let name = match &u.role {
                    UnknownRole::EinsteinConstant => u.name.clone(),
                    UnknownRole::SupportCoefficient(m) => {
                        crate::geometry::default_name(&m.permute(&perm))
                    }
                };
                (u.id, by_name[&name])
            })
            .collect();
        let moved: BTreeSet<(MultiIndex, String)> = s1
            .equations
            .iter()
            .map(|e| (e.monomial.permute(&perm), rename(&e.poly, &map).to_string()))
            .collect();
        let direct: BTreeSet<(MultiIndex, String)> =
            s2.equations.iter().map(|e| (e.monomial.clone(), e.poly.to_string())).collect();
        assert_eq!(moved, direct, "perm {perm:?}");

        let o1 = solve_spec(&spec, 4).unwrap();
        let o2 = solve_spec(&image, 4).unwrap();
        assert_eq!(o1.status, o2.status);
    }
}

#[test]
fn solution_sets_correspond_under_relabelling() {
    let spec = PotentialSpec::symbolic(2, vec![idx(&[2, 0]), idx(&[1, 1]), idx(&[0, 2])]).unwrap();
    let image = spec.permute(&[1, 0]);
    let canon = |e: &SpecEntry| -> BTreeSet<String> {
        e.solutions.iter().map(|s| canonical_numeric(&s.spec).to_string() + &s.lambda).collect()
    };
    let (a, b) = (solve_spec(&spec, 4).unwrap(), solve_spec(&image, 4).unwrap());
    assert_eq!(canon(&a), canon(&b));
    assert_eq!(canon(&a).len(), 1);
}

#[test]
fn small_sweeps() {
    let r = sweep(&SweepConfig::new((1, 1), 0)).unwrap();
    assert_eq!(r.models.len(), 1);
    assert_eq!(r.models[0].tag, ModelTag::CpnUnit);
    assert_eq!(r.models[0].lambda, "4");

    let r = sweep(&SweepConfig::new((7, 8), 3)).unwrap();
    assert!(r.blocks.iter().filter(|b| b.k >= 1).all(|b| b.method == BlockMethod::Shortcut));
    assert_eq!(r.summary.specs, 2);
    assert!(r.models.iter().all(|m| m.tag == ModelTag::CpnUnit));
    assert_eq!(r.summary_line(), "1 distinct model spaces, 0 UNKNOWN, 0 UNRESOLVED");
}

#[test]
fn plane_sweep_finds_the_three_models() {
    let cfg = SweepConfig::new((2, 2), 3).with_deg_cap(2);
    let r = sweep(&cfg).unwrap();
    assert_eq!(r.summary.unresolved, 0);
    let tags: Vec<(ModelTag, String)> = r.models.iter().map(|m| (m.tag, m.lambda.clone())).collect();
    assert_eq!(tags.len(), 3);
    for t in [
        (ModelTag::CpnUnit, "6".to_string()),
        (ModelTag::CpnScaled(2), "3".to_string()),
        (ModelTag::ProductOfLines, "4".to_string()),
    ] {
        assert!(tags.contains(&t), "{t:?}");
    }
    let par = sweep(&cfg.clone().with_jobs(4)).unwrap();
    assert_eq!(r, par);
}

#[test]
fn sweep_rejects_bad_parameters() {
    assert!(sweep(&SweepConfig::new((0, 2), 1)).is_err());
    assert!(sweep(&SweepConfig::new((3, 9), 1)).is_err());
    assert!(sweep(&SweepConfig::new((2, 2), 1).with_truncation(2)).is_err());
    assert!(sweep(&SweepConfig::new((2, 2), 1).with_jobs(0)).is_err());
}
