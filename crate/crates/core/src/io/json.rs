//! Field-by-field reading of parsed JSON with path-qualified errors.

use serde_json::{Map, Value};

use super::IoError;
use crate::exactalg::{parse_rational, MultiIndex};
use crate::geometry::Coef;
use crate::Rational;

pub(crate) fn parse_document(text: &str) -> Result<Map<String, Value>, IoError> {
    let v: Value = serde_json::from_str(text).map_err(|e| IoError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    match v {
        Value::Object(m) => Ok(m),
        _ => Err(IoError::field("$", "expected a JSON object")),
    }
}

pub(crate) fn reject_unknown(obj: &Map<String, Value>, path: &str, known: &[&str]) -> Result<(), IoError> {
    match obj.keys().find(|k| !known.contains(&k.as_str())) {
        Some(k) => Err(IoError::field(join(path, k), "unknown field")),
        None => Ok(()),
    }
}

pub(crate) fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

pub(crate) fn required<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value, IoError> {
    obj.get(key).ok_or_else(|| IoError::field(join(path, key), "missing field"))
}

pub(crate) fn dimension(v: &Value, path: &str) -> Result<usize, IoError> {
    match v.as_u64() {
        Some(n) if (1..=64).contains(&n) => Ok(n as usize),
        _ => Err(IoError::field(path, format!("expected an integer in 1..64, got {v}"))),
    }
}

pub(crate) fn rational(v: &Value, path: &str) -> Result<Rational, IoError> {
    let s = v
        .as_str()
        .ok_or_else(|| IoError::field(path, format!("expected a rational string \"p/q\", got {v}")))?;
    parse_rational(s).ok_or_else(|| {
        IoError::field(path, format!("not an exact rational: \"{s}\" (use p or p/q, no decimals)"))
    })
}

pub(crate) fn coefficient(v: &Value, path: &str) -> Result<Coef, IoError> {
    match v {
        Value::Object(o) => {
            reject_unknown(o, path, &["sym"])?;
            let name = required(o, path, "sym")?;
            match name.as_str() {
                Some(s) if !s.is_empty() => Ok(Coef::Symbol(s.to_string())),
                _ => Err(IoError::field(join(path, "sym"), "expected a non-empty name")),
            }
        }
        _ => rational(v, path).map(Coef::Value),
    }
}

pub(crate) fn exponents(v: &Value, path: &str, n: usize) -> Result<MultiIndex, IoError> {
    let arr = v.as_array().ok_or_else(|| IoError::field(path, "expected an array of exponents"))?;
    if arr.len() != n {
        return Err(IoError::field(path, format!("expected {n} exponents, got {}", arr.len())));
    }
    let mut e = Vec::with_capacity(n);
    for (i, x) in arr.iter().enumerate() {
        match x.as_u64() {
            Some(k) if k <= u16::MAX as u64 => e.push(k as u16),
            _ => return Err(IoError::field(format!("{path}[{i}]"), format!("expected a non-negative integer, got {x}"))),
        }
    }
    Ok(MultiIndex::new(e))
}

/// `monomials` entries as `(exponents, coefficient)`.
pub(crate) fn monomials(obj: &Map<String, Value>, n: usize) -> Result<Vec<(MultiIndex, Coef)>, IoError> {
    let Some(list) = obj.get("monomials") else { return Ok(Vec::new()) };
    let arr = list.as_array().ok_or_else(|| IoError::field("monomials", "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, item)| {
            let path = format!("monomials[{i}]");
            let o = item.as_object().ok_or_else(|| IoError::field(&path, "expected an object"))?;
            reject_unknown(o, &path, &["exponents", "coef"])?;
            let m = exponents(required(o, &path, "exponents")?, &join(&path, "exponents"), n)?;
            let c = coefficient(required(o, &path, "coef")?, &join(&path, "coef"))?;
            Ok((m, c))
        })
        .collect()
}
