use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use super::Scalar;

/// Identifier of a symbolic unknown. Id 0 is reserved for the Einstein constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub const LAMBDA: VarId = VarId(0);
}

/// Monomial in the unknowns: sorted `(var, exponent)` pairs, exponents > 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[(VarId, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: VarId) -> Self {
        Monomial(smallvec::smallvec![(v, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|(v, _)| *v)
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Removes `v` entirely, returning its exponent and the remaining monomial.
    pub fn split_off(&self, v: VarId) -> (u32, Monomial) {
        let e = self.exponent(v);
        (e, Monomial(self.0.iter().copied().filter(|(w, _)| *w != v).collect()))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in the symbolic unknowns with exact coefficients.
///
/// Zero coefficients are never stored, so `is_zero` is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoefPoly<T: Scalar> {
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> Default for CoefPoly<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> CoefPoly<T> {
    pub fn zero() -> Self {
        CoefPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn var(v: VarId) -> Self {
        Self::monomial(Monomial::var(v), T::one())
    }

    pub fn monomial(m: Monomial, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        CoefPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, T)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    /// The value if this polynomial has no unknowns (zero included).
    pub fn as_constant(&self) -> Option<T> {
        match self.terms.len() {
            0 => Some(T::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> T {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(T::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> T {
        self.terms.get(m).cloned().unwrap_or_else(T::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &CoefPoly<T>) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += a * b` without materialising the product.
    pub fn add_product(&mut self, a: &CoefPoly<T>, b: &CoefPoly<T>) {
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                self.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
    }

    pub fn scale(&self, c: &T) -> CoefPoly<T> {
        if c.is_zero() {
            return Self::zero();
        }
        CoefPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> CoefPoly<T> {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Unknowns occurring in this polynomial, ascending.
    pub fn vars(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> = self.terms.keys().flat_map(|m| m.vars()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn contains_var(&self, v: VarId) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Splits `self = sum_k coeffs[k] * v^k`.
    pub fn coefficients_in(&self, v: VarId) -> Vec<CoefPoly<T>> {
        let mut out = vec![Self::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    /// Replaces `v` by `value` everywhere.
    pub fn substitute(&self, v: VarId, value: &CoefPoly<T>) -> CoefPoly<T> {
        if !self.contains_var(v) {
            return self.clone();
        }
        let parts = self.coefficients_in(v);
        let mut out = Self::zero();
        let mut power = Self::one();
        for (k, part) in parts.iter().enumerate() {
            if k > 0 {
                power = &power * value;
            }
            if !part.is_zero() {
                out.add_product(part, &power);
            }
        }
        out
    }

    /// Evaluates at a full assignment; `None` if some unknown is unassigned.
    pub fn evaluate(&self, value: impl Fn(VarId) -> Option<T>) -> Option<T> {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                let x = value(v)?;
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        Some(acc)
    }

    pub fn map_coefficients<U: Scalar>(&self, f: impl Fn(&T) -> U) -> CoefPoly<U> {
        CoefPoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Human-readable rendering with caller-supplied unknown names.
    pub fn display_with<'a>(&'a self, names: &'a dyn Fn(VarId) -> String) -> DisplayPoly<'a, T> {
        DisplayPoly { poly: self, names }
    }
}

pub struct DisplayPoly<'a, T: Scalar> {
    poly: &'a CoefPoly<T>,
    names: &'a dyn Fn(VarId) -> String,
}

impl<T: Scalar> fmt::Display for DisplayPoly<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        // Highest degree first, constant last.
        let mut order: Vec<(&Monomial, &T)> = self.poly.terms.iter().collect();
        order.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| a.0.cmp(b.0)));
        for (i, (m, c)) in order.into_iter().enumerate() {
            let s = c.to_string();
            let (neg, mag) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
                continue;
            }
            if mag != "1" {
                write!(f, "{mag}*")?;
            }
            for (j, &(v, e)) in m.factors().iter().enumerate() {
                if j > 0 {
                    write!(f, "*")?;
                }
                write!(f, "{}", (self.names)(v))?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl<T: Scalar> fmt::Display for CoefPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: VarId| {
            if v == VarId::LAMBDA {
                "lambda".to_string()
            } else {
                format!("u{}", v.0)
            }
        };
        write!(f, "{}", self.display_with(&names))
    }
}

impl<T: Scalar> Add for &CoefPoly<T> {
    type Output = CoefPoly<T>;
    fn add(self, rhs: &CoefPoly<T>) -> CoefPoly<T> {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<T: Scalar> Sub for &CoefPoly<T> {
    type Output = CoefPoly<T>;
    fn sub(self, rhs: &CoefPoly<T>) -> CoefPoly<T> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<T: Scalar> Mul for &CoefPoly<T> {
    type Output = CoefPoly<T>;
    fn mul(self, rhs: &CoefPoly<T>) -> CoefPoly<T> {
        let mut out = CoefPoly::zero();
        out.add_product(self, rhs);
        out
    }
}

impl<T: Scalar> Neg for &CoefPoly<T> {
    type Output = CoefPoly<T>;
    fn neg(self) -> CoefPoly<T> {
        CoefPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}
