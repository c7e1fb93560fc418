//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use kahler_core::exactalg::{Monomial, VarId};
use kahler_core::geometry::{certify_exact, degree_bound_lambda, EinsteinCandidate, PotentialSpec};
use kahler_core::io::{Format, Render};
use kahler_core::oracle::oracle_check;
use kahler_core::solver::{
    extract_constraints, solve_spec, sweep, ClassificationReport, ConstraintSystem, ModelTag, SolveStatus,
    SweepConfig,
};
use kahler_core::{MultiIndex, Poly, Rational, Series, XSeries};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn idx(e: &[u16]) -> MultiIndex {
    MultiIndex::new(e.iter().copied())
}

fn flat(n: usize) -> PotentialSpec {
    PotentialSpec::flat(n)
}

fn veronese() -> PotentialSpec {
    PotentialSpec::numeric(2, [(idx(&[2, 0]), q(1, 4)), (idx(&[1, 1]), q(1, 2)), (idx(&[0, 2]), q(1, 4))]).unwrap()
}

fn segre() -> PotentialSpec {
    PotentialSpec::numeric(2, [(idx(&[1, 1]), q(1, 1))]).unwrap()
}

fn var_named(sys: &ConstraintSystem, name: &str) -> Poly {
    let u = sys.unknowns.iter().find(|u| u.name == name).unwrap_or_else(|| panic!("no unknown {name}"));
    Poly::var(u.id)
}

fn lambda() -> Poly {
    Poly::var(VarId::LAMBDA)
}

fn criterion_1() -> Result<String, String> {
    let mut cases = vec![(flat(2), q(6, 1)), (veronese(), q(3, 1)), (segre(), q(4, 1))];
    for n in 1..=6 {
        cases.push((flat(n), q(2 * (n as i64 + 1), 1)));
    }
    for (spec, lambda) in &cases {
        let cert = certify_exact(&EinsteinCandidate { spec: spec.clone(), lambda: lambda.clone() })
            .map_err(|e| format!("{spec}: {e}"))?;
        if !cert.passed() {
            return Err(format!("{spec}, lambda {lambda}: {:?}", cert.verdict));
        }
    }
    Ok(format!("{} certificates", cases.len()))
}

/// `e = r * expected` for a single nonzero rational `r`, compared term by term.
fn proportional(e: &Poly, expected: &Poly) -> bool {
    let mut ratio: Option<Rational> = None;
    let terms: BTreeMap<&Monomial, &Rational> = e.terms().collect();
    let want: BTreeMap<&Monomial, &Rational> = expected.terms().collect();
    if terms.keys().collect::<Vec<_>>() != want.keys().collect::<Vec<_>>() {
        return false;
    }
    for (m, c) in &terms {
        let r = *c / want[m];
        match &ratio {
            None => ratio = Some(r),
            Some(x) if *x == r => {}
            Some(_) => return false,
        }
    }
    ratio.is_some_and(|r| !r.is_zero())
}

fn criterion_2() -> Result<String, String> {
    for n in 2..=4usize {
        let spec = PotentialSpec::symbolic(n, MultiIndex::all_of_degree(n, 2)).unwrap();
        let sys = extract_constraints(&spec, 3).map_err(|e| e.to_string())?;
        let block: Vec<_> = sys.block(1).collect();
        if block.len() != n {
            return Err(format!("n = {n}: {} first-order equations", block.len()));
        }
        for (h, e) in block.iter().enumerate() {
            // 4 a_h + sum_k b_hk = (n + 1) - λ/2
            let mut lhs = var_named(&sys, &format!("a{}", h + 1)).scale(&q(4, 1));
            for k in (0..n).filter(|&k| k != h) {
                lhs = &lhs + &var_named(&sys, &format!("b{}{}", h.min(k) + 1, h.max(k) + 1));
            }
            let rhs = &Poly::constant(q(n as i64 + 1, 1)) - &lambda().scale(&q(1, 2));
            let expected = &lhs - &rhs;
            if !proportional(&e.poly, &expected) {
                return Err(format!("n = {n}, x{}: {}", h + 1, sys.render_poly(&e.poly)));
            }
        }
    }
    Ok("n = 2, 3, 4 first-order systems match".into())
}

/// Whether `target` lies in the rational span of `basis`.
fn in_span(target: &Poly, basis: &[Poly]) -> bool {
    type Row = BTreeMap<Monomial, Rational>;
    let to_row = |p: &Poly| -> Row { p.terms().map(|(m, c)| (m.clone(), c.clone())).collect() };
    let reduce = |rows: &[Row], mut v: Row| {
        for r in rows {
            let (pm, pc) = r.iter().next().unwrap();
            if let Some(c) = v.get(pm).cloned() {
                let f = c / pc;
                for (m, rc) in r {
                    *v.entry(m.clone()).or_insert_with(Rational::zero) -= &f * rc;
                }
                v.retain(|_, c| !c.is_zero());
            }
        }
        v
    };
    let mut rows: Vec<Row> = Vec::new();
    for b in basis {
        let v = reduce(&rows, to_row(b));
        if !v.is_empty() {
            rows.push(v);
        }
    }
    reduce(&rows, to_row(target)).is_empty()
}

fn criterion_3() -> Result<String, String> {
    // b12 present, a1 = a2 = 0, cubic terms symbolic
    let mut support = vec![idx(&[1, 1])];
    support.extend(MultiIndex::all_of_degree(2, 3));
    let spec = PotentialSpec::symbolic(2, support).unwrap();
    let sys = extract_constraints(&spec, 4).map_err(|e| e.to_string())?;
    let b12 = var_named(&sys, "b12").vars()[0];
    let sys = sys.substitute(b12, &(&Poly::constant(q(3, 1)) - &lambda().scale(&q(1, 2))));
    let block: Vec<Poly> = sys.block(2).map(|e| e.poly.clone()).collect();
    let d12 = &var_named(&sys, "d12") - &var_named(&sys, "c1").scale(&q(9, 1));
    let d21 = &var_named(&sys, "d21") - &var_named(&sys, "c2").scale(&q(9, 1));
    if !in_span(&d12, &block) || !in_span(&d21, &block) {
        return Err("d12 = 9 c1 or d21 = 9 c2 not implied".into());
    }
    if in_span(&var_named(&sys, "d12"), &block) {
        return Err("order-3 block is degenerate".into());
    }

    // b12 = 0 with a1, a2 nonzero
    let mut support = vec![idx(&[2, 0]), idx(&[0, 2])];
    support.extend(MultiIndex::all_of_degree(2, 3));
    let spec = PotentialSpec::symbolic(2, support).unwrap();
    let entry = solve_spec(&spec, 5).map_err(|e| e.to_string())?;
    if entry.status != SolveStatus::Infeasible {
        return Err(format!("b12 = 0 branch is {:?}", entry.status));
    }
    let w = entry.witness.ok_or("no witness")?;
    let lhs = w.equation.strip_suffix(" = 0").ok_or("witness not of the form ... = 0")?;
    let got: BTreeSet<&str> = lhs.split(" + ").collect();
    let want: BTreeSet<&str> = ["4*a1", "4*d12", "4*d21"].into();
    if got != want {
        return Err(format!("witness {}", w.equation));
    }
    Ok(format!("d12 = 9c1, d21 = 9c2; witness {}", w.equation))
}

fn criterion_4(report: &ClassificationReport) -> Result<String, String> {
    let s = &report.summary;
    if s.unresolved != 0 || s.unknown != 0 {
        return Err(report.summary_line());
    }
    let found: BTreeSet<(usize, ModelTag, String)> =
        report.models.iter().map(|m| (m.n, m.tag.clone(), m.lambda.clone())).collect();
    let mut expected: BTreeSet<(usize, ModelTag, String)> =
        (2..=6).map(|n| (n, ModelTag::CpnUnit, (2 * (n + 1)).to_string())).collect();
    expected.insert((2, ModelTag::CpnScaled(2), "3".into()));
    expected.insert((2, ModelTag::ProductOfLines, "4".into()));
    if found != expected {
        return Err(format!("models {found:?}"));
    }
    if report.models.len() != expected.len() {
        return Err(format!("{} models, expected {}", report.models.len(), expected.len()));
    }
    if report.solutions().any(|sol| !sol.certificate.passed()) {
        return Err("uncertified solution".into());
    }
    Ok(format!("{} specs; {}", s.specs, report.summary_line()))
}

fn random_numeric(rng: &mut ChaCha8Rng) -> PotentialSpec {
    let n = rng.gen_range(1..=3);
    let monos: Vec<MultiIndex> = (2..=3).flat_map(|d| MultiIndex::all_of_degree(n, d)).collect();
    let support: Vec<(MultiIndex, Rational)> = monos
        .into_iter()
        .filter_map(|m| rng.gen_bool(0.4).then(|| (m, q(rng.gen_range(1..=12), rng.gen_range(1..=8)))))
        .collect();
    PotentialSpec::numeric(n, support).unwrap()
}

fn criterion_5(report: &ClassificationReport) -> Result<String, String> {
    let check = |spec: &PotentialSpec, lambda: &Rational| -> Result<(), String> {
        let top = q(2 * (spec.dim() as i64 + 1), 1);
        if !lambda.is_positive() || *lambda > top {
            return Err(format!("{spec}: lambda {lambda} outside (0, {top}]"));
        }
        if *lambda < degree_bound_lambda(spec) {
            return Err(format!("{spec}: lambda {lambda} below the degree bound"));
        }
        Ok(())
    };
    let mut solved = 0;
    for sol in report.solutions() {
        check(&sol.spec, &sol.lambda_value)?;
        solved += 1;
    }

    let hand = [
        (flat(2), q(4, 1), q(6, 1)),
        (veronese(), q(2, 1), q(3, 1)),
        (
            PotentialSpec::numeric(1, [(idx(&[2]), q(1, 3)), (idx(&[3]), q(1, 27))]).unwrap(),
            q(2, 3),
            q(4, 3),
        ),
    ];
    for (spec, bound, lambda) in &hand {
        if degree_bound_lambda(spec) != *bound {
            return Err(format!("{spec}: bound {} != {bound}", degree_bound_lambda(spec)));
        }
        let cert = certify_exact(&EinsteinCandidate { spec: spec.clone(), lambda: lambda.clone() })
            .map_err(|e| e.to_string())?;
        if !cert.passed() {
            return Err(format!("{spec}: lambda {lambda} not certified"));
        }
        check(spec, lambda)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut rejected, mut tried) = (0, 0);
    while rejected < 100 {
        tried += 1;
        if tried > 1000 {
            return Err(format!("only {rejected} rejected specs in {tried} draws"));
        }
        let spec = random_numeric(&mut rng);
        let entry = solve_spec(&spec, spec.degree() + 2).map_err(|e| e.to_string())?;
        match entry.status {
            SolveStatus::Solved => {
                for sol in &entry.solutions {
                    check(&sol.spec, &sol.lambda_value)?;
                }
            }
            SolveStatus::Infeasible => rejected += 1,
            SolveStatus::Unresolved => return Err(format!("{spec}: unresolved")),
        }
    }
    Ok(format!("{solved} sweep solutions, 3 hand bounds, {rejected} random rejections"))
}

fn criterion_6() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let cases = 64;
    for _ in 0..cases {
        let n = rng.gen_range(1..=2);
        let monos: Vec<MultiIndex> = (2..=3).flat_map(|d| MultiIndex::all_of_degree(n, d)).collect();
        let support: Vec<(MultiIndex, Rational)> = monos
            .into_iter()
            .filter_map(|m| rng.gen_bool(0.5).then(|| (m, q(rng.gen_range(1..=9), rng.gen_range(1..=7)))))
            .collect();
        let spec = PotentialSpec::numeric(n, support).unwrap();
        let r = oracle_check(&spec).map_err(|e| format!("{spec}: {e}"))?;
        if !r.equal {
            return Err(format!("{spec}: {:?}", r.first_difference));
        }
    }
    Ok(format!("{cases} random specs agree"))
}

fn series_of(n: usize, d: u32, zero_const: bool) -> impl Strategy<Value = XSeries> {
    let lo = u32::from(zero_const);
    let monos: Vec<MultiIndex> = (lo..=d).flat_map(|k| MultiIndex::all_of_degree(n, k)).collect();
    let len = monos.len();
    proptest::collection::vec((0..len, -9i64..=9, 1i64..=6), 0..8).prop_map(move |picks| {
        Series::from_scalars(n, d, picks.into_iter().map(|(i, a, b)| (monos[i].clone(), q(a, b)))).unwrap()
    })
}

fn triple() -> impl Strategy<Value = (XSeries, XSeries, XSeries)> {
    (1usize..=3, 1u32..=6)
        .prop_flat_map(|(n, d)| (series_of(n, d, false), series_of(n, d, false), series_of(n, d, false)))
}

fn criterion_7() -> Result<String, String> {
    const CASES: u32 = 128;
    let mut runner = TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    runner
        .run(&triple(), |(f, g, h)| {
            prop_assert_eq!(&f + &g, &g + &f);
            prop_assert_eq!(&f * &g, &g * &f);
            prop_assert_eq!(&(&f + &g) + &h, &f + &(&g + &h));
            prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
            prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
            Ok(())
        })
        .map_err(|e| format!("ring laws: {e}"))?;

    let mut runner = TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    let zero_const = (1usize..=3, 1u32..=6).prop_flat_map(|(n, d)| series_of(n, d, true));
    runner
        .run(&zero_const, |u| {
            let one = Series::one(u.dim(), u.truncation());
            prop_assert_eq!((&u.exp().unwrap() - &one).log1p().unwrap(), u.clone());
            prop_assert_eq!(u.log1p().unwrap().exp().unwrap(), &one + &u);
            Ok(())
        })
        .map_err(|e| format!("log/exp: {e}"))?;

    let mut runner = TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    runner
        .run(&(triple(), 0usize..3), |((f, g, _), var)| {
            let var = var % f.dim();
            let top = f.truncation() - 1;
            let lhs = (&f * &g).diff(var).unwrap().with_truncation(top);
            let rhs = &(&f.diff(var).unwrap() * &g) + &(&f * &g.diff(var).unwrap());
            prop_assert_eq!(lhs, rhs.with_truncation(top));
            Ok(())
        })
        .map_err(|e| format!("Leibniz: {e}"))?;
    Ok(format!("{CASES} cases each for ring laws, log/exp, Leibniz"))
}

fn criterion_8(single: &ClassificationReport, cfg: &SweepConfig) -> Result<String, String> {
    let parallel = sweep(&cfg.clone().with_jobs(8)).map_err(|e| e.to_string())?;
    for format in [Format::Json, Format::Text] {
        let (a, b) = (single.render(format), parallel.render(format));
        if a.as_bytes() != b.as_bytes() {
            return Err(format!("{format:?} reports differ"));
        }
    }
    Ok(format!("{} bytes of JSON identical for 1 and 8 workers", single.render(Format::Json).len()))
}

fn run(name: &str, f: impl FnOnce() -> Result<String, String>) -> bool {
    let start = Instant::now();
    let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let secs = start.elapsed().as_secs_f64();
    match &outcome {
        Ok(detail) => println!("PASS  {name:<40} {detail} ({secs:.1}s)"),
        Err(detail) => println!("FAIL  {name:<40} {detail} ({secs:.1}s)"),
    }
    outcome.is_ok()
}

fn main() -> ExitCode {
    let cfg = SweepConfig::new((2, 6), 3).with_deg_cap(3).with_jobs(1);
    let mut report: Option<ClassificationReport> = None;
    let mut ok = run("1 exact model certificates", criterion_1);
    ok &= run("2 first-order constraint systems", criterion_2);
    ok &= run("3 case-analysis relations", criterion_3);
    ok &= run("4 sweep dims 2..6, k_max 3, deg_cap 3", || {
        let r = sweep(&cfg).map_err(|e| e.to_string())?;
        let out = criterion_4(&r);
        report = Some(r);
        out
    });
    ok &= run("5 Einstein constant bounds", || criterion_5(report.as_ref().ok_or("sweep did not run")?));
    ok &= run("6 oracle equivalence", criterion_6);
    ok &= run("7 algebra properties", criterion_7);
    ok &= run("8 determinism across workers", || criterion_8(report.as_ref().ok_or("sweep did not run")?, &cfg));
    if ok {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
