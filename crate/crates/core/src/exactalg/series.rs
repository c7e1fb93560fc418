use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::Zero;

use super::{AlgebraError, CoefPoly, MultiIndex, Scalar};

/// Power series in `x_1..x_n`, truncated at total degree `D`.
///
/// Coefficients are [`CoefPoly`]s, so the same type carries both numeric
/// potentials and potentials with symbolic unknowns. Terms of degree above
/// the truncation are discarded by every operation; zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Series<T: Scalar> {
    dim: usize,
    truncation: u32,
    terms: BTreeMap<MultiIndex, CoefPoly<T>>,
}

impl<T: Scalar> Series<T> {
    pub fn zero(dim: usize, truncation: u32) -> Self {
        Series { dim, truncation, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, truncation: u32, c: CoefPoly<T>) -> Self {
        let mut s = Self::zero(dim, truncation);
        s.add_term(MultiIndex::zero(dim), c);
        s
    }

    pub fn one(dim: usize, truncation: u32) -> Self {
        Self::constant(dim, truncation, CoefPoly::one())
    }

    /// The series `x_var` (0-based variable index).
    pub fn var(dim: usize, truncation: u32, var: usize) -> Self {
        Self::monomial(dim, truncation, MultiIndex::unit(dim, var), CoefPoly::one())
    }

    pub fn monomial(dim: usize, truncation: u32, m: MultiIndex, c: CoefPoly<T>) -> Self {
        let mut s = Self::zero(dim, truncation);
        s.add_term(m, c);
        s
    }

    pub fn from_terms(
        dim: usize,
        truncation: u32,
        terms: impl IntoIterator<Item = (MultiIndex, CoefPoly<T>)>,
    ) -> Result<Self, AlgebraError> {
        let mut s = Self::zero(dim, truncation);
        for (m, c) in terms {
            if m.dim() != dim {
                return Err(AlgebraError::DimensionMismatch { left: dim, right: m.dim() });
            }
            s.add_term(m, c);
        }
        Ok(s)
    }

    /// From numeric coefficients.
    pub fn from_scalars(
        dim: usize,
        truncation: u32,
        terms: impl IntoIterator<Item = (MultiIndex, T)>,
    ) -> Result<Self, AlgebraError> {
        Self::from_terms(dim, truncation, terms.into_iter().map(|(m, c)| (m, CoefPoly::constant(c))))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero terms in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &CoefPoly<T>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &MultiIndex) -> CoefPoly<T> {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> CoefPoly<T> {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// Highest degree with a nonzero coefficient.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    /// Lowest degree with a nonzero coefficient, `None` for the zero series.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(MultiIndex::degree)
    }

    /// `true` when every coefficient is free of unknowns.
    pub fn is_numeric(&self) -> bool {
        self.terms.values().all(|c| c.as_constant().is_some())
    }

    pub fn add_term(&mut self, m: MultiIndex, c: CoefPoly<T>) {
        debug_assert_eq!(m.dim(), self.dim);
        if c.is_zero() || m.degree() > self.truncation {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_compatible(&self, other: &Series<T>) -> Result<(), AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch { left: self.dim, right: other.dim });
        }
        if self.truncation != other.truncation {
            return Err(AlgebraError::TruncationMismatch {
                left: self.truncation,
                right: other.truncation,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Series<T>) -> Result<Series<T>, AlgebraError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Series<T>) -> Result<Series<T>, AlgebraError> {
        self.try_add(&-other)
    }

    /// Cauchy product, truncated.
    pub fn try_mul(&self, other: &Series<T>) -> Result<Series<T>, AlgebraError> {
        self.check_compatible(other)?;
        if self.is_numeric() && other.is_numeric() {
            return Ok(self.mul_numeric(other));
        }
        let mut acc: BTreeMap<MultiIndex, CoefPoly<T>> = BTreeMap::new();
        // Grouping by degree lets the inner loop stop early.
        let rhs: Vec<(&MultiIndex, &CoefPoly<T>, u32)> =
            other.terms.iter().map(|(m, c)| (m, c, m.degree())).collect();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for &(mb, cb, db) in &rhs {
                if da + db > self.truncation {
                    break;
                }
                acc.entry(ma.add(mb)).or_default().add_product(ca, cb);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Series { dim: self.dim, truncation: self.truncation, terms: acc })
    }

    fn mul_numeric(&self, other: &Series<T>) -> Series<T> {
        let scalars = |s: &Series<T>| -> Vec<(MultiIndex, T, u32)> {
            s.terms
                .iter()
                .map(|(m, c)| (m.clone(), c.constant_term(), m.degree()))
                .collect()
        };
        let (lhs, rhs) = (scalars(self), scalars(other));
        let lrefs: Vec<&T> = lhs.iter().map(|t| &t.1).collect();
        let rrefs: Vec<&T> = rhs.iter().map(|t| &t.1).collect();
        let ints = T::common_denominator(&lrefs).zip(T::common_denominator(&rrefs));
        let terms = if let Some(((ln, ld), (rn, rd))) = ints {
            let mut acc: HashMap<MultiIndex, BigInt> = HashMap::new();
            for ((ma, _, da), a) in lhs.iter().zip(&ln) {
                for ((mb, _, db), b) in rhs.iter().zip(&rn) {
                    if da + db > self.truncation {
                        break;
                    }
                    *acc.entry(ma.add(mb)).or_default() += a * b;
                }
            }
            let den = ld * rd;
            acc.into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m, CoefPoly::constant(T::from_fraction(c, &den).expect("paired with common_denominator"))))
                .collect()
        } else {
            let mut acc: HashMap<MultiIndex, T> = HashMap::new();
            for (ma, ca, da) in &lhs {
                for (mb, cb, db) in &rhs {
                    if da + db > self.truncation {
                        break;
                    }
                    let prod = ca.clone() * cb.clone();
                    let slot = acc.entry(ma.add(mb)).or_insert_with(T::zero);
                    *slot = std::mem::replace(slot, T::zero()) + prod;
                }
            }
            acc.into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m, CoefPoly::constant(c)))
                .collect()
        };
        Series { dim: self.dim, truncation: self.truncation, terms }
    }

    pub fn scale(&self, c: &CoefPoly<T>) -> Series<T> {
        let mut out = Series::zero(self.dim, self.truncation);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn scale_scalar(&self, c: &T) -> Series<T> {
        let mut out = Series::zero(self.dim, self.truncation);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.scale(c));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Series<T> {
        let mut out = Series::one(self.dim, self.truncation);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    fn require_zero_constant(&self) -> Result<(), AlgebraError> {
        if self.constant_term().is_zero() {
            Ok(())
        } else {
            Err(AlgebraError::NonzeroConstant)
        }
    }

    /// `log(1 + u)` for `u` without constant term.
    pub fn log1p(&self) -> Result<Series<T>, AlgebraError> {
        self.require_zero_constant()?;
        let d = self.truncation;
        if d == 0 || self.is_zero() {
            return Ok(Series::zero(self.dim, d));
        }
        // u * (1 - u/2 + u^2/3 - ...), Horner from the top coefficient.
        let coef = |k: u32| {
            let c = T::recip_int(k as u64);
            if k % 2 == 0 {
                -c
            } else {
                c
            }
        };
        let mut h = Series::constant(self.dim, d, CoefPoly::constant(coef(d)));
        for k in (1..d).rev() {
            h = &(self * &h) + &Series::constant(self.dim, d, CoefPoly::constant(coef(k)));
        }
        Ok(self * &h)
    }

    /// Multiplicative inverse; the constant term must be a nonzero scalar.
    pub fn inverse(&self) -> Result<Series<T>, AlgebraError> {
        let c = self
            .constant_term()
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or(AlgebraError::NotInvertible)?;
        let c_inv = T::one() / c;
        let d = self.truncation;
        let one = Series::one(self.dim, d);
        // 1/(c(1 + u)) = (1/c)(1 - u(1 - u(1 - ...)))
        let u = &self.scale_scalar(&c_inv) - &one;
        let mut h = one.clone();
        for _ in 0..d {
            h = &one - &(&u * &h);
        }
        Ok(h.scale_scalar(&c_inv))
    }

    /// `exp(u)` for `u` without constant term.
    pub fn exp(&self) -> Result<Series<T>, AlgebraError> {
        self.require_zero_constant()?;
        let d = self.truncation;
        let one = Series::one(self.dim, d);
        // 1 + u(1 + u/2(1 + u/3(...)))
        let mut h = one.clone();
        for k in (1..=d).rev() {
            h = &one + &(self * &h).scale_scalar(&T::recip_int(k as u64));
        }
        Ok(h)
    }

    /// Formal partial derivative in `x_var` (0-based). The result keeps the
    /// truncation `D` but is only complete through degree `D - 1`.
    pub fn diff(&self, var: usize) -> Result<Series<T>, AlgebraError> {
        if var >= self.dim {
            return Err(AlgebraError::IndexOutOfRange { index: var, dim: self.dim });
        }
        let mut out = Series::zero(self.dim, self.truncation);
        for (m, c) in &self.terms {
            let e = m.get(var);
            if let Some(lower) = m.lower(var) {
                out.add_term(lower, c.scale(&T::from_i64(e as i64)));
            }
        }
        Ok(out)
    }

    /// Drop everything above `truncation`. Lowering only.
    pub fn truncate(&self, truncation: u32) -> Result<Series<T>, AlgebraError> {
        if truncation > self.truncation {
            return Err(AlgebraError::TruncationMismatch {
                left: self.truncation,
                right: truncation,
            });
        }
        Ok(self.with_truncation(truncation))
    }

    /// Reinterpret under a new truncation. Raising it treats the stored terms
    /// as an exact polynomial, which is only meaningful for polynomials.
    pub fn with_truncation(&self, truncation: u32) -> Series<T> {
        Series {
            dim: self.dim,
            truncation,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= truncation)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn map_coefficients(&self, f: impl Fn(&CoefPoly<T>) -> CoefPoly<T>) -> Series<T> {
        let mut out = Series::zero(self.dim, self.truncation);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Relabel variables (`x_i` becomes `x_{perm[i]}`).
    pub fn permute(&self, perm: &[usize]) -> Series<T> {
        let mut out = Series::zero(self.dim, self.truncation);
        for (m, c) in &self.terms {
            out.add_term(m.permute(perm), c.clone());
        }
        out
    }

    /// Embed into a higher-dimensional ring, `x_i` becoming `x_{offset + i}`.
    pub fn embed(&self, dim: usize, offset: usize) -> Series<T> {
        let mut out = Series::zero(dim, self.truncation);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; dim];
            e[offset..offset + self.dim].copy_from_slice(m.exponents());
            out.add_term(MultiIndex::new(e), c.clone());
        }
        out
    }
}

impl<T: Scalar> fmt::Debug for Series<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[n={}, D={}]({})", self.dim, self.truncation, self)
    }
}

impl<T: Scalar> fmt::Display for Series<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let simple = c.as_constant().filter(|v| !v.to_string().starts_with('-'));
            if m.is_zero() {
                match simple {
                    Some(v) => write!(f, "{v}")?,
                    None => write!(f, "({c})")?,
                }
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else if let Some(v) = simple {
                write!(f, "{v}*{m}")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}

// Operator forms panic on shape mismatch; use the `try_*` methods at API edges.

impl<T: Scalar> Add for &Series<T> {
    type Output = Series<T>;
    fn add(self, rhs: &Series<T>) -> Series<T> {
        self.try_add(rhs).expect("series shapes must match")
    }
}

impl<T: Scalar> Sub for &Series<T> {
    type Output = Series<T>;
    fn sub(self, rhs: &Series<T>) -> Series<T> {
        self.try_sub(rhs).expect("series shapes must match")
    }
}

impl<T: Scalar> Mul for &Series<T> {
    type Output = Series<T>;
    fn mul(self, rhs: &Series<T>) -> Series<T> {
        self.try_mul(rhs).expect("series shapes must match")
    }
}

impl<T: Scalar> Neg for &Series<T> {
    type Output = Series<T>;
    fn neg(self) -> Series<T> {
        Series {
            dim: self.dim,
            truncation: self.truncation,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}
