use serde_json::Value;

use super::json::{dimension, monomials, parse_document, rational, reject_unknown, required};
use super::IoError;
use crate::exactalg::{format_rational, MultiIndex, Series};
use crate::geometry::{build_potential, scaled_log_potential, Coef, PotentialSpec};
use crate::{Poly, Rational, XSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialForm {
    /// Coefficients of `Φ` itself.
    Series,
    /// `Φ = scale * log(1 + u)` with `u` given by the monomials.
    Log1p,
}

/// A Kähler potential `Φ` in `x`, as read from a potential file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PotentialSource {
    /// A spec file: `Φ = log P`.
    Spec(PotentialSpec),
    Explicit { dim: usize, form: PotentialForm, scale: Rational, terms: Vec<(MultiIndex, Rational)> },
}

impl PotentialSource {
    pub fn dim(&self) -> usize {
        match self {
            PotentialSource::Spec(s) => s.dim(),
            PotentialSource::Explicit { dim, .. } => *dim,
        }
    }

    /// `Φ` truncated at `truncation`.
    pub fn to_series(&self, truncation: u32) -> Result<XSeries, IoError> {
        match self {
            PotentialSource::Spec(spec) => {
                let t = truncation.max(spec.degree());
                let p = build_potential(spec, t)?;
                let u = &p - &Series::one(spec.dim(), t);
                Ok(u.log1p().map_err(crate::geometry::GeometryError::from)?.with_truncation(truncation))
            }
            PotentialSource::Explicit { dim, form, scale, terms } => {
                let s = Series::from_scalars(*dim, truncation, terms.iter().cloned())
                    .map_err(crate::geometry::GeometryError::from)?;
                match form {
                    PotentialForm::Series => Ok(s.scale(&Poly::constant(scale.clone()))),
                    PotentialForm::Log1p => Ok(scaled_log_potential(&s, scale)?),
                }
            }
        }
    }

    /// Short human-readable form of `Φ`.
    pub fn describe(&self) -> String {
        match self {
            PotentialSource::Spec(spec) => format!("log({spec})"),
            PotentialSource::Explicit { dim, form, scale, terms } => {
                let inner = Series::from_scalars(*dim, u32::MAX, terms.iter().cloned())
                    .map(|s| s.to_string())
                    .unwrap_or_default();
                match form {
                    PotentialForm::Series if scale == &Rational::from_integer(1.into()) => inner,
                    PotentialForm::Series => format!("{}*({inner})", format_rational(scale)),
                    PotentialForm::Log1p => format!("{}*log(1 + {inner})", format_rational(scale)),
                }
            }
        }
    }
}

/// Reads a potential file: `{"n", "form": "series" | "log1p", "scale", "monomials"}`.
/// A document without `form` is read as a spec file and stands for `log P`.
pub fn parse_potential_file(text: &str) -> Result<PotentialSource, IoError> {
    let obj = parse_document(text)?;
    let Some(form) = obj.get("form") else {
        return super::parse_spec_file(text).map(|f| PotentialSource::Spec(f.spec));
    };
    reject_unknown(&obj, "", &["n", "form", "scale", "monomials"])?;
    let form = match form {
        Value::String(s) if s == "series" => PotentialForm::Series,
        Value::String(s) if s == "log1p" => PotentialForm::Log1p,
        other => return Err(IoError::field("form", format!("expected \"series\" or \"log1p\", got {other}"))),
    };
    let dim = dimension(required(&obj, "", "n")?, "n")?;
    let scale = match obj.get("scale") {
        Some(v) => rational(v, "scale")?,
        None => Rational::from_integer(1.into()),
    };
    let mut terms = Vec::new();
    for (i, (m, c)) in monomials(&obj, dim)?.into_iter().enumerate() {
        let Coef::Value(c) = c else {
            return Err(IoError::field(format!("monomials[{i}].coef"), "symbolic coefficients are not allowed here"));
        };
        if form == PotentialForm::Log1p && m.is_zero() {
            return Err(IoError::field(format!("monomials[{i}].exponents"), "log1p argument must vanish at the origin"));
        }
        if terms.iter().any(|(t, _)| t == &m) {
            return Err(IoError::field(format!("monomials[{i}].exponents"), "duplicate monomial"));
        }
        terms.push((m, c));
    }
    Ok(PotentialSource::Explicit { dim, form, scale, terms })
}

impl From<PotentialSpec> for PotentialSource {
    fn from(s: PotentialSpec) -> Self {
        PotentialSource::Spec(s)
    }
}
