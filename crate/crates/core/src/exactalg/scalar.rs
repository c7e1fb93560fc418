use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_integer::Integer;
use num_traits::{Num, One, Signed, Zero};

/// Coefficient field for polynomials and series.
///
/// Everything in the algebra layer only needs field operations, so any exact
/// field type can be plugged in. The engine itself is instantiated with
/// [`BigRational`]; `Ratio<i64>`/`Ratio<i128>` are handy for small tests.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;

    /// `1/k` for a positive integer `k`.
    fn recip_int(k: u64) -> Self {
        Self::one() / Self::from_i64(k as i64)
    }

    /// Integer numerators over one common denominator, for types where
    /// integer arithmetic is cheaper than field arithmetic.
    fn common_denominator(_values: &[&Self]) -> Option<(Vec<BigInt>, BigInt)> {
        None
    }

    /// Inverse of [`Scalar::common_denominator`].
    fn from_fraction(_num: BigInt, _den: &BigInt) -> Option<Self> {
        None
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn common_denominator(values: &[&Self]) -> Option<(Vec<BigInt>, BigInt)> {
        let den = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let nums = values.iter().map(|v| v.numer() * (&den / v.denom())).collect();
        Some((nums, den))
    }

    fn from_fraction(num: BigInt, den: &BigInt) -> Option<Self> {
        Some(BigRational::new(num, den.clone()))
    }
}

macro_rules! impl_scalar_ratio {
    ($($t:ty),*) => {
        $(
            impl Scalar for Ratio<$t> {
                fn from_i64(v: i64) -> Self {
                    Ratio::from_integer(v as $t)
                }
            }
        )*
    };
}

impl_scalar_ratio!(i64, i128);

/// Scalars with a sign, needed wherever positivity matters.
pub trait OrderedScalar: Scalar + Signed + PartialOrd {}

impl<T: Scalar + Signed + PartialOrd> OrderedScalar for T {}

/// Parse an exact rational from `"p"` or `"p/q"`. Decimal notation is rejected.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() || s.contains('.') || s.contains('e') || s.contains('E') {
        return None;
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Canonical `p/q` (or `p` when integral) rendering.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
