use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{IoError, PotentialSource};
use crate::exactalg::format_rational;
use crate::geometry::{
    bochner_normalize, build_potential, certify_exact, degree_bound_lambda, ma_log_residual,
    projective_induction_check, Certificate, CertificateVerdict, EinsteinCandidate, InductionReport,
    InductionVerdict, PotentialSpec,
};
use crate::oracle::{oracle_check, OracleReport};
use crate::solver::{
    extract_constraints, BlockMethod, ClassificationReport, SolveStatus, SystemRecord,
};
use crate::{Poly, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// A report with a JSON form and a fixed-width text form.
pub trait Render: Serialize {
    fn to_text(&self) -> String;

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

/// Left-aligned columns separated by two spaces, trailing blanks trimmed.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&width).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(c);
            s.extend(std::iter::repeat(' ').take(w - c.chars().count()));
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out += &line(r.iter().map(|s| s.as_str()).collect());
    }
    out
}

fn fields(pairs: &[(&str, String)]) -> String {
    let w = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    pairs.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// The truncation-free certificate.
    Exact,
    /// The Monge-Ampère residual through the given degree.
    Degree(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum VerifyResult {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualSummary {
    pub degree: u32,
    pub nonzero_terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_nonzero: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub n: usize,
    pub potential: String,
    pub lambda: String,
    pub mode: &'static str,
    pub result: VerifyResult,
    /// `0 < λ <= 2(n + 1)`.
    pub within_einstein_bounds: bool,
    /// `2n / deg P`.
    pub degree_bound: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<ResidualSummary>,
}

/// Checks `det g = P^{-λ/2}` for a spec, exactly or through a degree.
pub fn verify_report(spec: &PotentialSpec, lambda: &Rational, mode: VerifyMode) -> Result<VerifyReport, IoError> {
    let cap = Rational::from_integer(BigInt::from(2 * (spec.dim() + 1)));
    let (result, certificate, residual, mode_name) = match mode {
        VerifyMode::Exact => {
            let cert = certify_exact(&EinsteinCandidate::new(spec.clone(), lambda.clone())?)?;
            let result = if cert.passed() { VerifyResult::Pass } else { VerifyResult::Fail };
            (result, Some(cert), None, "exact")
        }
        VerifyMode::Degree(d) => {
            let p = build_potential(spec, spec.degree())?;
            let r = ma_log_residual(&p, &Poly::constant(lambda.clone()), d)?;
            let first = r.terms().next();
            let summary = ResidualSummary {
                degree: d,
                nonzero_terms: r.len(),
                first_nonzero: first.map(|(m, _)| m.to_string()),
                coefficient: first.map(|(_, c)| c.to_string()),
            };
            let result = if r.is_zero() { VerifyResult::Pass } else { VerifyResult::Fail };
            (result, None, Some(summary), "degree")
        }
    };
    Ok(VerifyReport {
        schema: "kahler-verify/1",
        n: spec.dim(),
        potential: spec.to_string(),
        lambda: format_rational(lambda),
        mode: mode_name,
        result,
        within_einstein_bounds: lambda.is_positive() && lambda <= &cap,
        degree_bound: format_rational(&degree_bound_lambda(spec)),
        certificate,
        residual,
    })
}

impl Render for VerifyReport {
    fn to_text(&self) -> String {
        let mut rows = vec![
            ("potential", self.potential.clone()),
            ("n", self.n.to_string()),
            ("lambda", self.lambda.clone()),
            ("mode", self.mode.to_string()),
        ];
        if let Some(c) = &self.certificate {
            rows.push(("identity", format!("det(M)^{} = P^{}", c.q, c.exponent)));
            match &c.verdict {
                CertificateVerdict::Pass { lhs_hash, .. } => rows.push(("sha256", lhs_hash.clone())),
                CertificateVerdict::Fail { monomial, lhs, rhs } => {
                    rows.push(("witness", format!("{monomial}: lhs {lhs}, rhs {rhs}")))
                }
            }
        }
        if let Some(r) = &self.residual {
            rows.push(("degree", r.degree.to_string()));
            rows.push(("nonzero", r.nonzero_terms.to_string()));
            if let (Some(m), Some(c)) = (&r.first_nonzero, &r.coefficient) {
                rows.push(("witness", format!("{m}: {c}")));
            }
        }
        rows.push(("bounds", if self.within_einstein_bounds { "0 < lambda <= 2(n+1)" } else { "outside 0 < lambda <= 2(n+1)" }.to_string()));
        rows.push(("degree bound", format!("lambda >= {}", self.degree_bound)));
        rows.push(("result", match self.result { VerifyResult::Pass => "PASS", VerifyResult::Fail => "FAIL" }.to_string()));
        fields(&rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintsReport {
    pub schema: &'static str,
    pub potential: String,
    pub truncation: u32,
    #[serde(flatten)]
    pub system: SystemRecord,
}

/// Residual equations of a spec with at least one symbolic coefficient.
pub fn constraints_report(spec: &PotentialSpec, truncation: u32) -> Result<ConstraintsReport, IoError> {
    if !spec.is_symbolic() {
        return Err(IoError::field("monomials", "constraints need at least one symbolic coefficient"));
    }
    let sys = extract_constraints(spec, truncation)?;
    Ok(ConstraintsReport { schema: "kahler-constraints/1", potential: spec.to_string(), truncation, system: sys.record() })
}

impl Render for ConstraintsReport {
    fn to_text(&self) -> String {
        let mut out = fields(&[
            ("potential", self.potential.clone()),
            ("truncation", self.truncation.to_string()),
            ("unknowns", self.system.unknowns.join(", ")),
            ("positive", self.system.positive.join(", ")),
        ]);
        out.push('\n');
        let rows: Vec<Vec<String>> = self
            .system
            .equations
            .iter()
            .map(|e| {
                let m = crate::MultiIndex::new(e.monomial.iter().copied()).to_string();
                vec![e.degree.to_string(), m, e.equation.clone()]
            })
            .collect();
        out + &table(&["deg", "monomial", "equation"], &rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedReport {
    pub schema: &'static str,
    pub potential: String,
    #[serde(flatten)]
    pub report: InductionReport,
}

pub fn induced_report(src: &PotentialSource, degree: u32) -> Result<InducedReport, IoError> {
    let phi = src.to_series(degree)?;
    let report = projective_induction_check(&phi, degree)?;
    Ok(InducedReport { schema: "kahler-induced/1", potential: src.describe(), report })
}

impl Render for InducedReport {
    fn to_text(&self) -> String {
        let r = &self.report;
        let mut pairs = vec![
            ("potential", self.potential.clone()),
            ("n", r.dim.to_string()),
            ("degree", r.degree.to_string()),
        ];
        match &r.verdict {
            InductionVerdict::InducedUpTo { degree, codimension } => {
                pairs.push(("verdict", format!("INDUCED-UP-TO-{degree}")));
                pairs.push(("codimension", codimension.to_string()));
            }
            InductionVerdict::NotInduced { witness, coefficient } => {
                pairs.push(("verdict", "NOT-INDUCED".into()));
                pairs.push(("witness", format!("{witness}: {coefficient}")));
            }
        }
        let rows: Vec<Vec<String>> = r
            .coefficients
            .iter()
            .map(|(m, c)| {
                let sign = if c.is_negative() { "-" } else { "+" };
                vec![m.to_string(), format_rational(c), sign.to_string()]
            })
            .collect();
        fields(&pairs) + "\n" + &table(&["monomial", "coefficient", "sign"], &rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizeReport {
    pub schema: &'static str,
    pub potential: String,
    pub truncation: u32,
    /// Linear coefficients `c_a`; the substitution is `x_a -> x_a / c_a`.
    pub scales: Vec<String>,
    pub normalized: Vec<(Vec<u16>, String)>,
}

pub fn normalize_report(src: &PotentialSource, truncation: u32) -> Result<NormalizeReport, IoError> {
    let phi = src.to_series(truncation)?;
    let (norm, scales) = bochner_normalize(&phi)?;
    Ok(NormalizeReport {
        schema: "kahler-normalize/1",
        potential: src.describe(),
        truncation,
        scales: scales.iter().map(format_rational).collect(),
        normalized: norm
            .terms()
            .map(|(m, c)| {
                let v = c.as_constant().unwrap_or_else(Rational::zero);
                (m.exponents().to_vec(), format_rational(&v))
            })
            .collect(),
    })
}

impl Render for NormalizeReport {
    fn to_text(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .normalized
            .iter()
            .map(|(e, c)| vec![crate::MultiIndex::new(e.iter().copied()).to_string(), c.clone()])
            .collect();
        fields(&[
            ("potential", self.potential.clone()),
            ("truncation", self.truncation.to_string()),
            ("scales", self.scales.join(", ")),
        ]) + "\n"
            + &table(&["monomial", "coefficient"], &rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCheckReport {
    pub schema: &'static str,
    #[serde(flatten)]
    pub report: OracleReport,
}

pub fn oracle_report(spec: &PotentialSpec) -> Result<OracleCheckReport, IoError> {
    Ok(OracleCheckReport { schema: "kahler-oracle/1", report: oracle_check(spec)? })
}

impl Render for OracleCheckReport {
    fn to_text(&self) -> String {
        let r = &self.report;
        let mut pairs = vec![
            ("potential", r.potential.clone()),
            ("n", r.n.to_string()),
            ("terms", r.terms.to_string()),
            ("result", if r.equal { "EQUAL" } else { "DIFFERENT" }.to_string()),
        ];
        if let Some(d) = &r.first_difference {
            pairs.push(("difference", d.clone()));
        }
        fields(&pairs)
    }
}

impl Render for ClassificationReport {
    fn to_text(&self) -> String {
        let mut out = String::new();
        if self.summary.unresolved > 0 {
            out += &format!("WARNING: {} UNRESOLVED outcome(s), listed below\n\n", self.summary.unresolved);
        }
        out += &fields(&[
            ("schema", self.schema.clone()),
            ("dims", format!("{}..{}", self.dims[0], self.dims[1])),
            ("k_max", self.k_max.to_string()),
            ("deg_cap", self.deg_cap.to_string()),
            ("truncation", self.truncation.to_string()),
            ("scope", self.scope.clone()),
            ("exploratory", self.exploratory.to_string()),
        ]);

        let count = |b: &crate::solver::BlockReport, s: SolveStatus| {
            b.entries.iter().filter(|e| e.status == s).count().to_string()
        };
        let rows: Vec<Vec<String>> = self
            .blocks
            .iter()
            .map(|b| {
                let method = match b.method {
                    BlockMethod::Enumerated => "enumerated",
                    BlockMethod::Shortcut => "n>2k",
                };
                vec![
                    b.n.to_string(),
                    b.k.to_string(),
                    method.to_string(),
                    b.specs.to_string(),
                    count(b, SolveStatus::Solved),
                    count(b, SolveStatus::Infeasible),
                    count(b, SolveStatus::Unresolved),
                ]
            })
            .collect();
        out += "\nblocks\n";
        out += &table(&["n", "k", "method", "specs", "solved", "infeasible", "unresolved"], &rows);

        let rows: Vec<Vec<String>> = self
            .blocks
            .iter()
            .flat_map(|b| b.entries.iter())
            .flat_map(|e| {
                e.solutions.iter().map(move |s| {
                    vec![
                        e.n.to_string(),
                        e.k.to_string(),
                        s.lambda.clone(),
                        s.tag.to_string(),
                        if s.certificate.passed() { "PASS" } else { "FAIL" }.to_string(),
                        s.potential.clone(),
                    ]
                })
            })
            .collect();
        out += "\nsolutions\n";
        out += &table(&["n", "k", "lambda", "tag", "certificate", "potential"], &rows);

        let rows: Vec<Vec<String>> = self
            .models
            .iter()
            .map(|m| vec![m.n.to_string(), m.tag.to_string(), m.lambda.clone(), m.potential.clone()])
            .collect();
        out += "\nmodels\n";
        out += &table(&["n", "tag", "lambda", "potential"], &rows);

        let rows: Vec<Vec<String>> = self
            .entries()
            .map(|e| {
                let detail = match (&e.witness, &e.remnant) {
                    (Some(w), _) => {
                        let at = w.monomial.as_deref().map(|m| format!("[{m}] ")).unwrap_or_default();
                        format!("{at}{}", w.equation)
                    }
                    (None, Some(r)) => format!("{:?}: {}", r.reason, r.equations.join("; ")),
                    _ => String::new(),
                };
                vec![
                    e.n.to_string(),
                    e.k.to_string(),
                    e.status.to_string(),
                    e.decided_at.to_string(),
                    e.potential.clone(),
                    detail,
                ]
            })
            .collect();
        out += "\nspecs\n";
        out += &table(&["n", "k", "status", "order", "potential", "witness"], &rows);
        out += &format!("\nsummary: {}\n", self.summary_line());
        out
    }
}
