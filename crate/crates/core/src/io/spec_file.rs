use serde_json::{json, Value};

use super::json::{dimension, monomials, parse_document, rational, reject_unknown, required};
use super::IoError;
use crate::exactalg::format_rational;
use crate::geometry::{Coef, PotentialSpec, SupportTerm};
use crate::Rational;

/// A potential `P = 1 + sum x_a + sum c_j x^{m_j}` with an optional
/// Einstein constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecFile {
    pub spec: PotentialSpec,
    pub lambda: Option<Rational>,
}

/// Reads `{"n": .., "monomials": [{"exponents": [..], "coef": "p/q" | {"sym": ".."}}], "lambda": "p/q"}`.
pub fn parse_spec_file(text: &str) -> Result<SpecFile, IoError> {
    let obj = parse_document(text)?;
    reject_unknown(&obj, "", &["n", "monomials", "lambda"])?;
    let n = dimension(required(&obj, "", "n")?, "n")?;
    let support: Vec<SupportTerm> =
        monomials(&obj, n)?.into_iter().map(|(index, coef)| SupportTerm { index, coef }).collect();
    let spec = PotentialSpec::new(n, support).map_err(|e| IoError::field("monomials", e.to_string()))?;
    let lambda = obj.get("lambda").map(|v| rational(v, "lambda")).transpose()?;
    Ok(SpecFile { spec, lambda })
}

/// Canonical JSON for a spec; parses back to the same value.
pub fn emit_spec_file(spec: &PotentialSpec, lambda: Option<&Rational>) -> String {
    let monomials: Vec<Value> = spec
        .support()
        .iter()
        .map(|t| {
            let coef = match &t.coef {
                Coef::Value(v) => json!(format_rational(v)),
                Coef::Symbol(s) => json!({ "sym": s }),
            };
            json!({ "exponents": t.index.exponents(), "coef": coef })
        })
        .collect();
    let mut doc = json!({ "n": spec.dim(), "monomials": monomials });
    if let Some(l) = lambda {
        doc["lambda"] = json!(format_rational(l));
    }
    serde_json::to_string_pretty(&doc).expect("plain JSON value") + "\n"
}
