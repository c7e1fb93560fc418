use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// Exponent vector of a monomial `x_1^{m_1} ... x_n^{m_n}` in the
/// rotation-invariant variables `x_a = |z_a|^2`.
///
/// Ordered by total degree first; within a degree, monomials heavier in the
/// earlier variables come first (`x1^2 < x1*x2 < x2^2`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(SmallVec<[u16; 8]>);

impl MultiIndex {
    pub fn new(exponents: impl IntoIterator<Item = u16>) -> Self {
        MultiIndex(exponents.into_iter().collect())
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, n))
    }

    /// The linear monomial `x_var`.
    pub fn unit(n: usize, var: usize) -> Self {
        let mut m = Self::zero(n);
        m.0[var] = 1;
        m
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn get(&self, var: usize) -> u16 {
        self.0[var]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Exponent vector with `x_var` lowered by one, if possible.
    pub fn lower(&self, var: usize) -> Option<MultiIndex> {
        if self.0[var] == 0 {
            return None;
        }
        let mut m = self.clone();
        m.0[var] -= 1;
        Some(m)
    }

    /// `true` when every variable divides into `other` at least as often.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Relabel variables: variable `i` of `self` becomes variable `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> MultiIndex {
        let mut out = Self::zero(self.dim());
        for (i, &e) in self.0.iter().enumerate() {
            out.0[perm[i]] = e;
        }
        out
    }

    /// Variables with a nonzero exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }

    /// All exponent vectors of length `n` and total degree exactly `d`, in order.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        fn rec(n: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<MultiIndex>) {
            if cur.len() + 1 == n {
                cur.push(left as u16);
                out.push(MultiIndex::new(cur.iter().copied()));
                cur.pop();
                return;
            }
            for e in (0..=left).rev() {
                cur.push(e as u16);
                rec(n, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

/// Renders as `x1^2*x2`, or `1` for the zero index.
impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_order_puts_leading_variable_first() {
        let mut v = MultiIndex::all_of_degree(2, 2);
        v.extend(MultiIndex::all_of_degree(2, 1));
        v.sort();
        let shown: Vec<String> = v.iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, ["x1", "x2", "x1^2", "x1*x2", "x2^2"]);
    }

    #[test]
    fn enumerates_all_of_degree() {
        assert_eq!(MultiIndex::all_of_degree(3, 2).len(), 6);
        assert_eq!(MultiIndex::all_of_degree(6, 3).len(), 56);
        assert!(MultiIndex::all_of_degree(4, 3).iter().all(|m| m.degree() == 3));
    }

    #[test]
    fn permute_and_lower() {
        let m = MultiIndex::new([2, 0, 1]);
        assert_eq!(m.permute(&[1, 2, 0]), MultiIndex::new([1, 2, 0]));
        assert_eq!(m.lower(1), None);
        assert_eq!(m.lower(0), Some(MultiIndex::new([1, 0, 1])));
        assert!(MultiIndex::new([1, 0, 1]).divides(&m));
    }
}
