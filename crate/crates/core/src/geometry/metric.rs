use crate::exactalg::{CoefPoly, MultiIndex, Scalar, Series};

use super::GeometryError;

/// First and second `x`-derivatives of `F = log P`.
///
/// In these variables the metric is `g_{ab̄} = δ_ab F_a + z̄_a z_b F_ab`, and
/// conjugating by `diag(z)` gives `det g = det(δ_ab F_a + x_a F_ab)`, a
/// matrix whose entries are series in `x` alone. Series here are truncated
/// one degree below the potential they came from; `F_a` is complete through
/// that degree and `F_ab` one degree less, which is all the determinant
/// needs since `F_ab` only ever appears multiplied by `x_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct HessianX<T: Scalar> {
    pub dim: usize,
    pub first: Vec<Series<T>>,
    pub second: Vec<Vec<Series<T>>>,
}

impl<T: Scalar> HessianX<T> {
    pub fn truncation(&self) -> u32 {
        self.first[0].truncation()
    }

    /// `F_a + x_a F_aa` on the diagonal, `x_a F_ab` off it.
    pub fn matrix_entry(&self, a: usize, b: usize) -> Series<T> {
        let n = self.dim;
        let d = self.truncation();
        let xa = Series::var(n, d, a);
        let off = &xa * &self.second[a][b];
        if a == b {
            &self.first[a] + &off
        } else {
            off
        }
    }

    pub fn matrix(&self) -> Vec<Vec<Series<T>>> {
        (0..self.dim).map(|a| (0..self.dim).map(|b| self.matrix_entry(a, b)).collect()).collect()
    }
}

/// Checks `P(0) = 1` and that the linear part is exactly `x_1 + ... + x_n`.
pub fn check_bochner_form<T: Scalar>(p: &Series<T>) -> Result<(), GeometryError> {
    let n = p.dim();
    if !p.constant_term().is_one() {
        return Err(GeometryError::NotBochnerForm("constant term must be 1".into()));
    }
    for a in 0..n {
        if !p.coeff(&MultiIndex::unit(n, a)).is_one() {
            return Err(GeometryError::NotBochnerForm(format!(
                "coefficient of x{} must be 1",
                a + 1
            )));
        }
    }
    Ok(())
}

/// Derivatives of `log P` for a potential in Bochner form, obtained by
/// differentiating the `log1p` series (no series division involved).
pub fn metric_in_x<T: Scalar>(p: &Series<T>) -> Result<HessianX<T>, GeometryError> {
    check_bochner_form(p)?;
    if p.truncation() == 0 {
        return Err(GeometryError::TruncationTooLow { needed: 1, got: 0 });
    }
    let n = p.dim();
    let d = p.truncation();
    let f = (p - &Series::one(n, d)).log1p()?;
    let mut first = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    for a in 0..n {
        let fa = f.diff(a)?;
        let row = (0..n)
            .map(|b| Ok(fa.diff(b)?.with_truncation(d - 1)))
            .collect::<Result<Vec<_>, GeometryError>>()?;
        first.push(fa.with_truncation(d - 1));
        second.push(row);
    }
    Ok(HessianX { dim: n, first, second })
}

/// `det g` as a series in `x`, at the Hessian's truncation.
pub fn det_metric<T: Scalar>(h: &HessianX<T>) -> Series<T> {
    let m = h.matrix();
    determinant_by_elimination(&m).unwrap_or_else(|| determinant(&m))
}

/// `det g` through the permutation-cycle expansion: every `σ ∈ S_n`
/// contributes `sign(σ) ∏_{fixed a} (F_a + x_a F_aa) ∏_{cycles c} ∏_{a∈c} x_a F_{a,σ(a)}`.
///
/// Same value as [`det_metric`]; kept as an independent route.
pub fn det_metric_cycles<T: Scalar>(h: &HessianX<T>) -> Series<T> {
    let n = h.dim;
    let d = h.truncation();
    let mut total = Series::zero(n, d);
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut seen = vec![false; n];
        let mut term = Series::one(n, d);
        let mut cycles = 0;
        let mut moved = 0u32;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            if perm[start] == start {
                seen[start] = true;
                term = &term * &h.matrix_entry(start, start);
                continue;
            }
            let mut a = start;
            let mut exps = vec![0u16; n];
            while !seen[a] {
                seen[a] = true;
                exps[a] = 1;
                moved += 1;
                term = &term * &h.second[a][perm[a]];
                a = perm[a];
            }
            term = &term * &Series::monomial(n, d, MultiIndex::new(exps), CoefPoly::one());
        }
        if moved <= d && !term.is_zero() {
            if (n - cycles) % 2 == 1 {
                total = &total - &term;
            } else {
                total = &total + &term;
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    total
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Determinant of a square matrix of series by row-by-row expansion over
/// column subsets: the Leibniz sum with shared partial products memoised.
pub fn determinant<T: Scalar>(m: &[Vec<Series<T>>]) -> Series<T> {
    let n = m.len();
    assert!(n > 0 && n <= 16, "determinant size out of range");
    assert!(m.iter().all(|row| row.len() == n), "matrix must be square");
    let (dim, d) = (m[0][0].dim(), m[0][0].truncation());
    let full = 1usize << n;
    let mut minors: Vec<Option<Series<T>>> = vec![None; full];
    minors[0] = Some(Series::one(dim, d));
    // Process subsets in order of size so row r = |S| is fixed.
    let mut by_size: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for s in 0..full {
        by_size[s.count_ones() as usize].push(s);
    }
    for (r, subsets) in by_size.iter().enumerate().take(n) {
        for &s in subsets {
            let Some(minor) = minors[s].take() else { continue };
            if minor.is_zero() {
                continue;
            }
            for j in 0..n {
                if s & (1 << j) != 0 || m[r][j].is_zero() {
                    continue;
                }
                let above = (s >> (j + 1)).count_ones();
                let prod = &m[r][j] * &minor;
                let slot = &mut minors[s | (1 << j)];
                let updated = match slot.take() {
                    None if above % 2 == 0 => prod,
                    None => -&prod,
                    Some(acc) if above % 2 == 0 => &acc + &prod,
                    Some(acc) => &acc - &prod,
                };
                *slot = Some(updated);
            }
        }
    }
    minors[full - 1].take().unwrap_or_else(|| Series::zero(dim, d))
}

/// Determinant by Gaussian elimination without pivoting. Needs every pivot
/// to have an invertible scalar constant term, as for the metric matrix
/// (identity at the origin); `None` otherwise.
pub fn determinant_by_elimination<T: Scalar>(m: &[Vec<Series<T>>]) -> Option<Series<T>> {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|row| row.len() == n), "matrix must be square");
    let mut a: Vec<Vec<Series<T>>> = m.to_vec();
    let mut det = Series::one(a[0][0].dim(), a[0][0].truncation());
    for k in 0..n {
        let inv = a[k][k].inverse().ok()?;
        det = &det * &a[k][k];
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] * &inv;
            for j in k + 1..n {
                if !a[k][j].is_zero() {
                    a[i][j] = &a[i][j] - &(&f * &a[k][j]);
                }
            }
        }
    }
    Some(det)
}

/// `R = log det g + (λ/2) log P`, complete through degree `truncation`.
///
/// The Monge-Ampère equation `det g = exp(-(λ/2) log P)` holds to order `D`
/// exactly when `R` vanishes through degree `D`. `lambda` may be symbolic;
/// `R` is always affine in it.
pub fn ma_log_residual<T: Scalar>(
    p: &Series<T>,
    lambda: &CoefPoly<T>,
    truncation: u32,
) -> Result<Series<T>, GeometryError> {
    let n = p.dim();
    let work = p.with_truncation(truncation + 1);
    let h = metric_in_x(&work)?;
    let det = det_metric(&h);
    let one = Series::one(n, truncation);
    let log_det = (&det - &one).log1p()?;
    let log_p = (&p.with_truncation(truncation) - &one).log1p()?;
    let half = lambda.scale(&T::recip_int(2));
    Ok(&log_det + &log_p.scale(&half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_potential, PotentialSpec};
    use crate::{Poly, Rational, XSeries};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn idx(e: &[u16]) -> MultiIndex {
        MultiIndex::new(e.iter().copied())
    }

    /// `(1 + sum x)^k` for integer `k` (possibly negative) as a series,
    /// via the generalized binomial series in `s = sum x`.
    fn flat_power(n: usize, d: u32, k: i64) -> XSeries {
        let s = (0..n).fold(Series::zero(n, d), |acc, a| &acc + &Series::var(n, d, a));
        let mut out = Series::zero(n, d);
        let mut binom = q(1, 1);
        let mut pow = Series::one(n, d);
        for j in 0..=d as i64 {
            out = &out + &pow.scale_scalar(&binom);
            binom = binom * q(k - j, j + 1);
            pow = &pow * &s;
        }
        out
    }

    #[test]
    fn scalar_case() {
        let p = build_potential(&PotentialSpec::flat(1), 5).unwrap();
        let h = metric_in_x(&p).unwrap();
        assert_eq!(h.first[0], flat_power(1, 4, -1));
        assert_eq!(
            h.second[0][0].with_truncation(3),
            flat_power(1, 3, -2).scale_scalar(&q(-1, 1))
        );
        assert_eq!(det_metric(&h), flat_power(1, 4, -2));
    }

    #[test]
    fn flat_cp2_derivatives_and_determinant() {
        let p = build_potential(&PotentialSpec::flat(2), 5).unwrap();
        let h = metric_in_x(&p).unwrap();
        // oracle: log1p then differentiate, independently of metric_in_x
        let f = (&p - &Series::one(2, 5)).log1p().unwrap();
        for a in 0..2 {
            assert_eq!(h.first[a], f.diff(a).unwrap().with_truncation(4));
            assert_eq!(h.first[a], flat_power(2, 4, -1));
            for b in 0..2 {
                assert_eq!(
                    h.second[a][b].with_truncation(3),
                    flat_power(2, 3, -2).scale_scalar(&q(-1, 1))
                );
            }
        }
        assert_eq!(det_metric(&h), flat_power(2, 4, -3));
    }

    #[test]
    fn segre_splits() {
        let s = PotentialSpec::numeric(2, [(idx(&[1, 1]), q(1, 1))]).unwrap();
        let h = metric_in_x(&build_potential(&s, 6).unwrap()).unwrap();
        assert!(h.second[0][1].is_zero());
        let a = flat_power(1, 5, -2).embed(2, 0);
        let b = flat_power(1, 5, -2).embed(2, 1);
        assert_eq!(det_metric(&h), &a * &b);
    }

    #[test]
    fn cycle_formula_matches_minor_expansion() {
        let spec = PotentialSpec::numeric(
            3,
            [(idx(&[2, 0, 0]), q(1, 3)), (idx(&[0, 1, 1]), q(2, 5)), (idx(&[1, 1, 1]), q(1, 7))],
        )
        .unwrap();
        let h = metric_in_x(&build_potential(&spec, 5).unwrap()).unwrap();
        assert_eq!(det_metric(&h), det_metric_cycles(&h));

        let sym = PotentialSpec::symbolic(3, [idx(&[1, 1, 0]), idx(&[0, 0, 2])]).unwrap();
        let h = metric_in_x(&build_potential(&sym, 4).unwrap()).unwrap();
        assert_eq!(det_metric(&h), det_metric_cycles(&h));
    }

    #[test]
    fn elimination_matches_minor_expansion() {
        let spec = PotentialSpec::numeric(
            4,
            [(idx(&[1, 1, 0, 0]), q(1, 2)), (idx(&[0, 1, 0, 2]), q(3, 1)), (idx(&[0, 0, 3, 0]), q(1, 5))],
        )
        .unwrap();
        let m = metric_in_x(&build_potential(&spec, 5).unwrap()).unwrap().matrix();
        assert_eq!(determinant_by_elimination(&m).unwrap(), determinant(&m));
        // zero constant term on the diagonal: no pivot
        let x = Series::<Rational>::var(1, 3, 0);
        assert!(determinant_by_elimination(&[vec![x]]).is_none());
    }

    #[test]
    fn rejects_non_bochner() {
        let p = Series::from_scalars(1, 3, [(idx(&[0]), q(1, 1)), (idx(&[1]), q(2, 1))]).unwrap();
        assert!(matches!(metric_in_x(&p), Err(GeometryError::NotBochnerForm(_))));
        let p = Series::from_scalars(1, 3, [(idx(&[0]), q(2, 1)), (idx(&[1]), q(1, 1))]).unwrap();
        assert!(matches!(metric_in_x(&p), Err(GeometryError::NotBochnerForm(_))));
    }

    #[test]
    fn residual_vanishes_for_model_spaces() {
        let flat = build_potential(&PotentialSpec::flat(2), 1).unwrap();
        for d in 1..=6 {
            assert!(ma_log_residual(&flat, &Poly::constant(q(6, 1)), d).unwrap().is_zero());
        }
        let ver = PotentialSpec::numeric(
            2,
            [(idx(&[2, 0]), q(1, 4)), (idx(&[1, 1]), q(1, 2)), (idx(&[0, 2]), q(1, 4))],
        )
        .unwrap();
        let p = build_potential(&ver, 2).unwrap();
        assert!(ma_log_residual(&p, &Poly::constant(q(3, 1)), 8).unwrap().is_zero());
    }

    #[test]
    fn symbolic_lambda_pins_veronese() {
        let ver = PotentialSpec::numeric(
            2,
            [(idx(&[2, 0]), q(1, 4)), (idx(&[1, 1]), q(1, 2)), (idx(&[0, 2]), q(1, 4))],
        )
        .unwrap();
        let p = build_potential(&ver, 2).unwrap();
        let lam = Poly::var(crate::VarId::LAMBDA);
        let r = ma_log_residual(&p, &lam, 3).unwrap();
        // 4a1 + b12 - 3 + λ/2 with a1 = 1/4, b12 = 1/2  ->  λ/2 - 3/2
        let expect = &lam.scale(&q(1, 2)) - &Poly::constant(q(3, 2));
        assert_eq!(r.coeff(&idx(&[1, 0])), expect);
        assert_eq!(r.coeff(&idx(&[0, 1])), expect);
        let at3 = r.map_coefficients(|c| c.substitute(crate::VarId::LAMBDA, &Poly::constant(q(3, 1))));
        assert!(at3.is_zero());
    }
}
