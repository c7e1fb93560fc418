//! Brute-force cross-check of the `x`-space determinant.
//!
//! Works directly in `(z, z̄)`: the potential is expanded as a polynomial in
//! `2n` variables, differentiated term by term, and the numerator
//! `det(P P_{z_a z̄_b} - P_{z_a} P_{z̄_b})` is summed over all permutations.
//! Nothing here goes through [`crate::Series`] or the metric code; only the
//! rational type is shared.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::format_rational;
use crate::geometry::{numerator_determinant, Coef, GeometryError, PotentialSpec};
use crate::Rational;

/// Largest dimension the Leibniz expansion is run for.
pub const MAX_ORACLE_DIM: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle refuses n = {0}: the permutation expansion is limited to n <= {MAX_ORACLE_DIM}")]
    DimensionTooLarge(usize),
    #[error("oracle needs numeric coefficients")]
    Symbolic,
    #[error("projection discarded the non-invariant term {0}")]
    Lossy(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

type Exps = Vec<u32>;

/// Polynomial in `z_1..z_n, z̄_1..z̄_n`, keyed by `(exponents of z, exponents of z̄)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    n: usize,
    terms: BTreeMap<(Exps, Exps), Rational>,
}

impl BiPoly {
    pub fn zero(n: usize) -> Self {
        BiPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; n], vec![0; n], c);
        p
    }

    /// `c z^a z̄^b`.
    pub fn term(n: usize, a: Exps, b: Exps, c: Rational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(a, b, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Exps, Exps), &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, a: Exps, b: Exps, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((a, b)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(a.clone(), b.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly { n: self.n, terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero(self.n);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                let a = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                let b = b1.iter().zip(b2).map(|(x, y)| x + y).collect();
                out.add_term(a, b, c1 * c2);
            }
        }
        out
    }

    /// `∂/∂z_i` (`conj = false`) or `∂/∂z̄_i` (`conj = true`).
    pub fn derivative(&self, i: usize, conj: bool) -> BiPoly {
        let mut out = BiPoly::zero(self.n);
        for ((a, b), c) in &self.terms {
            let (mut a, mut b) = (a.clone(), b.clone());
            let e = if conj { &mut b[i] } else { &mut a[i] };
            if *e == 0 {
                continue;
            }
            let k = *e;
            *e -= 1;
            out.add_term(a, b, c * Rational::from_integer(k.into()));
        }
        out
    }

    /// `true` when every term has matching `z` and `z̄` exponents.
    pub fn is_rotation_invariant(&self) -> bool {
        self.terms.keys().all(|(a, b)| a == b)
    }
}

fn monomial_string(a: &[u32], b: &[u32]) -> String {
    let mut parts = Vec::new();
    for (name, e) in [("z", a), ("zbar", b)] {
        for (i, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(format!("{name}{}", i + 1)),
                _ => parts.push(format!("{name}{}^{k}", i + 1)),
            }
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b), c)| format!("{}*{}", format_rational(c), monomial_string(a, b)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `P(z, z̄)` for a numeric spec: `1 + sum z_a z̄_a + sum c_j z^{m_j} z̄^{m_j}`.
pub fn zspace_potential(spec: &PotentialSpec) -> Result<BiPoly, OracleError> {
    let n = spec.dim();
    let mut p = BiPoly::constant(n, Rational::one());
    for a in 0..n {
        let mut e = vec![0; n];
        e[a] = 1;
        p = p.add(&BiPoly::term(n, e.clone(), e, Rational::one()));
    }
    for t in spec.support() {
        let Coef::Value(c) = &t.coef else { return Err(OracleError::Symbolic) };
        let e: Exps = t.index.exponents().iter().map(|&k| k as u32).collect();
        p = p.add(&BiPoly::term(n, e.clone(), e, c.clone()));
    }
    Ok(p)
}

/// Signed permutations of `0..n`, by recursive insertion.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    if n == 0 {
        return vec![(Vec::new(), false)];
    }
    let mut out = Vec::new();
    for (p, odd) in signed_permutations(n - 1) {
        // insert n-1 at position i; it passes n-1-i larger-index entries
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            let flips = (p.len() - i) % 2 == 1;
            out.push((q, odd ^ flips));
        }
    }
    out
}

/// `det(P P_{z_a z̄_b} - P_{z_a} P_{z̄_b})` by the Leibniz formula.
pub fn zspace_det_numerator(spec: &PotentialSpec) -> Result<BiPoly, OracleError> {
    let n = spec.dim();
    if n > MAX_ORACLE_DIM {
        return Err(OracleError::DimensionTooLarge(n));
    }
    let p = zspace_potential(spec)?;
    let dz: Vec<BiPoly> = (0..n).map(|a| p.derivative(a, false)).collect();
    let dzb: Vec<BiPoly> = (0..n).map(|b| p.derivative(b, true)).collect();
    let m: Vec<Vec<BiPoly>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| p.mul(&dz[a].derivative(b, true)).sub(&dz[a].mul(&dzb[b])))
                .collect()
        })
        .collect();
    let mut det = BiPoly::zero(n);
    for (perm, odd) in signed_permutations(n) {
        let term = (0..n).fold(BiPoly::constant(n, Rational::one()), |acc, a| acc.mul(&m[a][perm[a]]));
        det = if odd { det.sub(&term) } else { det.add(&term) };
    }
    Ok(det)
}

/// Projection onto rotation-invariant terms, as `x`-exponents and
/// coefficients. With `lossless` set, any other term is an error.
pub fn rotation_project(b: &BiPoly, lossless: bool) -> Result<BTreeMap<Exps, Rational>, OracleError> {
    let mut out = BTreeMap::new();
    for ((za, zb), c) in b.terms() {
        if za == zb {
            out.insert(za.clone(), c.clone());
        } else if lossless {
            return Err(OracleError::Lossy(monomial_string(za, zb)));
        }
    }
    Ok(out)
}

/// Outcome of comparing the two determinant computations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub potential: String,
    pub terms: usize,
    pub equal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_difference: Option<String>,
}

/// Compares the projected `(z, z̄)` determinant with the engine's `x`-space
/// numerator determinant, coefficient by coefficient.
pub fn oracle_check(spec: &PotentialSpec) -> Result<OracleReport, OracleError> {
    if spec.is_symbolic() {
        return Err(OracleError::Symbolic);
    }
    let z = rotation_project(&zspace_det_numerator(spec)?, true)?;
    let x: BTreeMap<Exps, Rational> = numerator_determinant(spec)?
        .terms()
        .map(|(m, c)| {
            let e = m.exponents().iter().map(|&k| k as u32).collect();
            (e, c.as_constant().expect("numeric spec"))
        })
        .collect();
    let first_difference = z
        .keys()
        .chain(x.keys())
        .find(|k| z.get(*k) != x.get(*k))
        .map(|k| {
            format!(
                "x^{:?}: oracle {}, engine {}",
                k,
                z.get(k).map(format_rational).unwrap_or_else(|| "0".into()),
                x.get(k).map(format_rational).unwrap_or_else(|| "0".into())
            )
        });
    Ok(OracleReport {
        n: spec.dim(),
        potential: spec.to_string(),
        terms: z.len(),
        equal: first_difference.is_none(),
        first_difference,
    })
}
