use std::collections::BTreeMap;

use num_traits::{Signed};
use rayon::prelude::*;
use serde::Serialize;

use super::classify::{classify, ModelTag};
use super::enumerate::{canonical_supports, permutations};
use super::solve::{render_assignment, solve_system, Assignment, Remnant, SolveStatus, Witness, WitnessKind};
use super::system::{residual_system, ConstraintSystem};
use super::SolverError;
use crate::exactalg::{format_rational, MultiIndex, VarId};
use crate::geometry::{
    build_potential, certify_exact, degree_bound_lambda, ma_log_residual, Certificate,
    EinsteinCandidate, PotentialSpec,
};
use crate::{Poly, Rational};

/// Version tag written into every classification report.
pub const REPORT_SCHEMA: &str = "kahler-classification/1";

/// Largest dimension the sweep accepts.
const MAX_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub dims: (usize, usize),
    pub k_max: usize,
    pub deg_cap: u32,
    pub truncation: u32,
    pub jobs: usize,
}

impl SweepConfig {
    /// Degree cap `max(k_max, 2)`, truncation `deg_cap + 2`, one worker.
    pub fn new(dims: (usize, usize), k_max: usize) -> Self {
        let deg_cap = (k_max as u32).max(2);
        SweepConfig { dims, k_max, deg_cap, truncation: deg_cap + 2, jobs: 1 }
    }

    pub fn with_deg_cap(mut self, deg_cap: u32) -> Self {
        self.deg_cap = deg_cap;
        self.truncation = deg_cap + 2;
        self
    }

    pub fn with_truncation(mut self, truncation: u32) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    fn validate(&self) -> Result<(), SolverError> {
        let (lo, hi) = self.dims;
        if lo == 0 || lo > hi || hi > MAX_DIM {
            return Err(SolverError::InvalidParameters(format!(
                "dimensions {lo}..{hi} outside 1..{MAX_DIM}"
            )));
        }
        if self.deg_cap < 2 {
            return Err(SolverError::InvalidParameters("degree cap must be at least 2".into()));
        }
        if self.truncation < self.deg_cap + 1 {
            return Err(SolverError::TruncationTooLow {
                needed: self.deg_cap + 1,
                got: self.truncation,
            });
        }
        if self.jobs == 0 {
            return Err(SolverError::InvalidParameters("need at least one worker".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionRecord {
    pub potential: String,
    pub lambda: String,
    pub assignment: Vec<String>,
    pub tag: ModelTag,
    pub degree_bound: String,
    pub certificate: Certificate,
    #[serde(skip)]
    pub spec: PotentialSpec,
    #[serde(skip)]
    pub lambda_value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessRecord {
    /// Residual monomial the contradicting equation came from.
    pub monomial: Option<String>,
    pub equation: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RemnantRecord {
    pub reason: super::UnresolvedReason,
    pub equations: Vec<String>,
    pub free: Vec<String>,
    pub bindings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecEntry {
    pub n: usize,
    pub k: usize,
    pub potential: String,
    pub status: SolveStatus,
    /// Residual degree at which the outcome was decided.
    pub decided_at: u32,
    pub solutions: Vec<SolutionRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remnant: Option<RemnantRecord>,
    #[serde(skip)]
    pub spec: PotentialSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockMethod {
    /// Every canonical support of this size was solved.
    Enumerated,
    /// `n > 2k`: no support of this size can give an Einstein potential.
    Shortcut,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    pub n: usize,
    pub k: usize,
    pub method: BlockMethod,
    pub specs: usize,
    pub entries: Vec<SpecEntry>,
}

/// A distinct Einstein potential, up to relabelling of the variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ModelRecord {
    pub n: usize,
    pub tag: ModelTag,
    pub lambda: String,
    pub potential: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub specs: usize,
    pub solved: usize,
    pub infeasible: usize,
    pub unresolved: usize,
    pub shortcut_blocks: usize,
    /// Distinct Einstein potentials up to relabelling, over all dimensions.
    pub models: usize,
    /// Distinct model-space tags.
    pub model_spaces: usize,
    pub unknown: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub schema: String,
    pub dims: [usize; 2],
    pub k_max: usize,
    pub deg_cap: u32,
    pub truncation: u32,
    pub scope: String,
    pub exploratory: bool,
    pub blocks: Vec<BlockReport>,
    pub models: Vec<ModelRecord>,
    pub summary: Summary,
}

impl ClassificationReport {
    pub fn unresolved(&self) -> impl Iterator<Item = &SpecEntry> {
        self.entries().filter(|e| e.status == SolveStatus::Unresolved)
    }

    pub fn entries(&self) -> impl Iterator<Item = &SpecEntry> {
        self.blocks.iter().flat_map(|b| b.entries.iter())
    }

    pub fn solutions(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.entries().flat_map(|e| e.solutions.iter())
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} distinct model spaces, {} UNKNOWN, {} UNRESOLVED",
            self.summary.model_spaces, self.summary.unknown, self.summary.unresolved
        )
    }
}

/// Least relabelling of a numeric potential, as `(monomial, coefficient)`
/// pairs in graded order.
pub fn canonical_numeric(spec: &PotentialSpec) -> PotentialSpec {
    permutations(spec.dim())
        .iter()
        .map(|p| spec.permute(p))
        .min_by(|a, b| key(a).cmp(&key(b)))
        .expect("at least the identity")
}

fn key(spec: &PotentialSpec) -> Vec<(MultiIndex, String)> {
    spec.support().iter().map(|t| (t.index.clone(), t.coef.to_string())).collect()
}

fn witness_record(sys: &ConstraintSystem, w: &Witness) -> WitnessRecord {
    let (equation, reason) = match &w.kind {
        WitnessKind::NonzeroConstant => {
            (format!("{} = 0", sys.render_poly(&w.poly)), "no admissible solution".to_string())
        }
        WitnessKind::SignDefinite => (
            format!("{} = 0", sys.render_poly(&w.poly)),
            "all terms share one sign while the unknowns are positive".to_string(),
        ),
        WitnessKind::NotPositive(v) => match &w.source {
            Some(_) => (
                format!("{} = 0", sys.render_poly(&w.poly)),
                format!("no positive root for {}", sys.name_of(*v)),
            ),
            None => (
                format!("{} = {}", sys.name_of(*v), sys.render_poly(&w.poly)),
                format!("forces {} <= 0", sys.name_of(*v)),
            ),
        },
    };
    WitnessRecord { monomial: w.source.as_ref().map(|m| m.to_string()), equation, reason }
}

fn remnant_record(sys: &ConstraintSystem, r: &Remnant) -> RemnantRecord {
    RemnantRecord {
        reason: r.reason,
        equations: r.equations.iter().map(|e| format!("{} = 0", sys.render_poly(&e.poly))).collect(),
        free: r.free.iter().map(|&v| sys.name_of(v)).collect(),
        bindings: r
            .bindings
            .iter()
            .map(|(v, p)| format!("{} = {}", sys.name_of(*v), sys.render_poly(p)))
            .collect(),
    }
}

/// Checks a candidate solution against the full Monge-Ampère equation:
/// the residual at `check` must vanish and the exact certificate must pass.
fn validate(
    spec: &PotentialSpec,
    sys: &ConstraintSystem,
    a: &Assignment,
    check: u32,
) -> Result<Result<SolutionRecord, WitnessRecord>, SolverError> {
    let lambda = a.get(&VarId::LAMBDA).cloned().expect("λ is always solved for");
    let coefs: BTreeMap<VarId, Rational> =
        a.iter().filter(|(v, _)| **v != VarId::LAMBDA).map(|(v, r)| (*v, r.clone())).collect();
    let numeric = spec.assign(&coefs)?;
    if !lambda.is_positive() {
        return Ok(Err(WitnessRecord {
            monomial: None,
            equation: format!("lambda = {}", format_rational(&lambda)),
            reason: "Einstein constant not positive".into(),
        }));
    }
    let p = build_potential(&numeric, numeric.degree())?;
    let residual = ma_log_residual(&p, &Poly::constant(lambda.clone()), check)?;
    if let Some((m, c)) = residual.terms().find(|(_, c)| !c.is_zero()) {
        return Ok(Err(WitnessRecord {
            monomial: Some(m.to_string()),
            equation: format!("residual coefficient {c} at lambda = {}", format_rational(&lambda)),
            reason: format!("candidate fails at residual degree {}", m.degree()),
        }));
    }
    let certificate = certify_exact(&EinsteinCandidate::new(numeric.clone(), lambda.clone())?)?;
    if !certificate.passed() {
        return Ok(Err(WitnessRecord {
            monomial: None,
            equation: format!("det(M)^q = P^(2nq - p) at lambda = {}", format_rational(&lambda)),
            reason: "exact certificate fails".into(),
        }));
    }
    let tag = classify(&numeric, &lambda)?;
    Ok(Ok(SolutionRecord {
        potential: numeric.to_string(),
        lambda: format_rational(&lambda),
        assignment: render_assignment(a, |v| sys.name_of(v)),
        tag,
        degree_bound: format_rational(&degree_bound_lambda(&numeric)),
        certificate,
        spec: numeric,
        lambda_value: lambda,
    }))
}

/// Solves one symbolic support, raising the residual degree from 1 up to
/// `truncation` until the outcome is decided. Every solution is re-checked
/// at `truncation + 2` and by the exact certificate.
pub fn solve_spec(spec: &PotentialSpec, truncation: u32) -> Result<SpecEntry, SolverError> {
    let mut entry = SpecEntry {
        n: spec.dim(),
        k: spec.codimension(),
        potential: spec.to_string(),
        status: SolveStatus::Unresolved,
        decided_at: 0,
        solutions: Vec::new(),
        witness: None,
        remnant: None,
        spec: spec.clone(),
    };
    for d in 1..=truncation {
        let sys = residual_system(spec, d)?;
        let outcome = solve_system(&sys);
        entry.decided_at = d;
        match outcome.status {
            SolveStatus::Unresolved => {
                entry.remnant = outcome.remnant.as_ref().map(|r| remnant_record(&sys, r));
                continue;
            }
            SolveStatus::Infeasible => {
                entry.status = SolveStatus::Infeasible;
                entry.remnant = None;
                entry.witness = outcome.witness.as_ref().map(|w| witness_record(&sys, w));
                return Ok(entry);
            }
            SolveStatus::Solved => {
                entry.remnant = None;
                let mut first_failure = None;
                for a in &outcome.solutions {
                    match validate(spec, &sys, a, truncation + 2)? {
                        Ok(s) => entry.solutions.push(s),
                        Err(w) => {
                            first_failure.get_or_insert(w);
                        }
                    }
                }
                if entry.solutions.is_empty() {
                    entry.status = SolveStatus::Infeasible;
                    entry.witness = first_failure;
                } else {
                    entry.status = SolveStatus::Solved;
                }
                return Ok(entry);
            }
        }
    }
    Ok(entry)
}

/// Runs the classification search over `dims` and support sizes `0..=k_max`.
///
/// Blocks with `n > 2k`, `k >= 1`, are skipped without enumeration. The
/// specs of all other blocks are solved on a pool of `jobs` workers and the
/// results reassembled in enumeration order, so the report does not depend
/// on the worker count.
pub fn sweep(cfg: &SweepConfig) -> Result<ClassificationReport, SolverError> {
    cfg.validate()?;
    let (lo, hi) = cfg.dims;
    let mut blocks = Vec::new();
    let mut jobs: Vec<(usize, PotentialSpec)> = Vec::new();
    for n in lo..=hi {
        for k in 0..=cfg.k_max {
            let method =
                if k >= 1 && n > 2 * k { BlockMethod::Shortcut } else { BlockMethod::Enumerated };
            let mut specs = 0;
            if method == BlockMethod::Enumerated {
                for support in canonical_supports(n, k, cfg.deg_cap) {
                    let spec = PotentialSpec::symbolic(n, support)?;
                    jobs.push((blocks.len(), spec));
                    specs += 1;
                }
            }
            blocks.push(BlockReport { n, k, method, specs, entries: Vec::new() });
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| SolverError::WorkerPool(e.to_string()))?;
    let truncation = cfg.truncation;
    let results: Vec<Result<SpecEntry, SolverError>> =
        pool.install(|| jobs.par_iter().map(|(_, s)| solve_spec(s, truncation)).collect());
    for ((b, _), r) in jobs.iter().zip(results) {
        blocks[*b].entries.push(r?);
    }

    let mut summary = Summary::default();
    let mut models = BTreeMap::new();
    for b in &blocks {
        if b.method == BlockMethod::Shortcut {
            summary.shortcut_blocks += 1;
        }
        for e in &b.entries {
            summary.specs += 1;
            match e.status {
                SolveStatus::Solved => summary.solved += 1,
                SolveStatus::Infeasible => summary.infeasible += 1,
                SolveStatus::Unresolved => summary.unresolved += 1,
            }
            for s in &e.solutions {
                let canon = canonical_numeric(&s.spec);
                let rec = ModelRecord {
                    n: e.n,
                    tag: s.tag,
                    lambda: s.lambda.clone(),
                    potential: canon.to_string(),
                };
                models.insert((e.n, key(&canon), s.lambda.clone()), rec);
            }
        }
    }
    let models: Vec<ModelRecord> = models.into_values().collect();
    summary.models = models.len();
    summary.model_spaces = models.iter().map(|m| m.tag).collect::<std::collections::BTreeSet<_>>().len();
    summary.unknown = models.iter().filter(|m| m.tag == ModelTag::Unknown).count();

    Ok(ClassificationReport {
        schema: REPORT_SCHEMA.to_string(),
        dims: [lo, hi],
        k_max: cfg.k_max,
        deg_cap: cfg.deg_cap,
        truncation: cfg.truncation,
        scope: format!(
            "supports of at most {} monomials of degree 2..{}; nothing is claimed beyond this cap",
            cfg.k_max, cfg.deg_cap
        ),
        exploratory: cfg.k_max > 3,
        blocks,
        models,
        summary,
    })
}
