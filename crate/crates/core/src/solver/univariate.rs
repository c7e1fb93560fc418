use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Dense univariate polynomial, `coeffs[k]` multiplying `t^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(Vec<Rational>);

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    fn lead(&self) -> &Rational {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// Remainder of division by `d`.
    pub fn rem(&self, d: &UPoly) -> UPoly {
        assert!(!d.is_zero());
        let mut r = self.0.clone();
        let dd = d.degree();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let f = r.last().unwrap() / d.lead();
            for (k, c) in d.0.iter().enumerate() {
                r[shift + k] -= &f * c;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        UPoly::new(r)
    }

    /// Monic greatest common divisor; zero only if both inputs are zero.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.lead().clone();
        UPoly::new(a.0.into_iter().map(|c| c / &lead).collect())
    }

    /// Synthetic division by `(t - root)`; assumes `root` is a root.
    pub fn deflate(&self, root: &Rational) -> UPoly {
        let n = self.0.len();
        let mut out = vec![Rational::zero(); n.saturating_sub(1)];
        let mut carry = Rational::zero();
        for k in (1..n).rev() {
            carry = &self.0[k] + carry * root;
            out[k - 1] = carry.clone();
        }
        UPoly::new(out)
    }

    fn sign_at_infinity(&self, positive: bool) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let s = if self.lead().is_positive() { 1 } else { -1 };
        if positive || self.degree() % 2 == 0 {
            s
        } else {
            -s
        }
    }

    fn sturm_chain(&self) -> Vec<UPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain.last().unwrap().is_zero() {
            let k = chain.len();
            let r = chain[k - 2].rem(&chain[k - 1]);
            chain.push(UPoly::new(r.0.into_iter().map(|c| -c).collect()));
        }
        chain.pop();
        chain
    }

    /// Number of distinct real roots in `(0, ∞)` (or all of ℝ), by Sturm's theorem.
    pub fn count_real_roots(&self, positive_only: bool) -> usize {
        if self.degree() == 0 {
            return 0;
        }
        if positive_only && self.0[0].is_zero() {
            // Sturm needs p(0) != 0; the root at 0 is outside (0, ∞) anyway.
            return UPoly::new(self.0[1..].to_vec()).count_real_roots(true);
        }
        let chain = self.sturm_chain();
        let variations = |signs: Vec<i32>| {
            let s: Vec<i32> = signs.into_iter().filter(|&s| s != 0).collect();
            s.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let at_inf = variations(chain.iter().map(|p| p.sign_at_infinity(true)).collect());
        let low = if positive_only {
            variations(chain.iter().map(|p| sign(&p.eval(&Rational::zero()))).collect())
        } else {
            variations(chain.iter().map(|p| p.sign_at_infinity(false)).collect())
        };
        low.saturating_sub(at_inf)
    }

    /// All rational roots (distinct, ascending) via the rational root theorem,
    /// together with the cofactor left after dividing them out with
    /// multiplicity. `None` if the coefficients are too large to factor.
    pub fn rational_roots(&self) -> Option<(Vec<Rational>, UPoly)> {
        if self.is_zero() {
            return Some((Vec::new(), self.clone()));
        }
        let mut rest = self.clone();
        let mut roots = Vec::new();
        // t = 0
        if rest.0[0].is_zero() {
            roots.push(Rational::zero());
            while !rest.is_zero() && rest.0[0].is_zero() {
                rest = UPoly::new(rest.0[1..].to_vec());
            }
        }
        if rest.degree() == 0 {
            return Some((roots, rest));
        }
        let ints = rest.integer_coefficients();
        let lead_divs = divisors(ints.last().unwrap())?;
        let const_divs = divisors(&ints[0])?;
        let mut candidates: Vec<Rational> = Vec::new();
        for p in &const_divs {
            for q in &lead_divs {
                let r = Rational::new(p.clone(), q.clone());
                candidates.push(r.clone());
                candidates.push(-r);
            }
        }
        candidates.sort();
        candidates.dedup();
        for c in candidates {
            if rest.degree() == 0 {
                break;
            }
            if rest.eval(&c).is_zero() {
                roots.push(c.clone());
                while rest.degree() > 0 && rest.eval(&c).is_zero() {
                    rest = rest.deflate(&c);
                }
            }
        }
        roots.sort();
        Some((roots, rest))
    }

    /// Integer multiple with coprime coefficients.
    fn integer_coefficients(&self) -> Vec<BigInt> {
        let l = self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        ints.into_iter().map(|c| c / &g).collect()
    }
}

fn sign(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Positive divisors by trial division; gives up above ~10^12.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    if n == 0 || n > 1_000_000_000_000 {
        return None;
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}
