use crate::exactalg::MultiIndex;
use crate::geometry::PotentialSpec;

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let mut i = n;
        while i > 1 && p[i - 2] >= p[i - 1] {
            i -= 1;
        }
        if i <= 1 {
            break;
        }
        let mut j = n - 1;
        while p[j] <= p[i - 2] {
            j -= 1;
        }
        p.swap(i - 2, j);
        p[i - 1..].reverse();
    }
    out
}

/// Monomials of degree `2..=deg_cap` in `n` variables, ascending.
pub fn candidate_monomials(n: usize, deg_cap: u32) -> Vec<MultiIndex> {
    (2..=deg_cap).flat_map(|d| MultiIndex::all_of_degree(n, d)).collect()
}

/// `true` when no variable relabelling gives a smaller sorted support.
pub fn is_canonical(support: &[MultiIndex], perms: &[Vec<usize>]) -> bool {
    let mut image: Vec<MultiIndex> = Vec::with_capacity(support.len());
    for perm in perms {
        image.clear();
        image.extend(support.iter().map(|m| m.permute(perm)));
        image.sort();
        if image.as_slice() < support {
            return false;
        }
    }
    true
}

/// Canonical supports with exactly `k` monomials.
pub fn canonical_supports(n: usize, k: usize, deg_cap: u32) -> Vec<Vec<MultiIndex>> {
    let monos = candidate_monomials(n, deg_cap);
    let perms = permutations(n);
    let mut out = Vec::new();
    if k > monos.len() {
        return out;
    }
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        let support: Vec<MultiIndex> = pick.iter().map(|&i| monos[i].clone()).collect();
        if is_canonical(&support, &perms) {
            out.push(support);
        }
        // next k-combination of 0..monos.len()
        let m = monos.len();
        let mut i = k;
        while i > 0 && pick[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        pick[i - 1] += 1;
        for j in i..k {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

/// Symbolic supports of size at most `k_max` drawn from distinct monomials of
/// degree `2..=deg_cap`, one representative per variable-permutation class
/// (the least one in graded order).
pub fn enumerate_supports(n: usize, k_max: usize, deg_cap: u32) -> Vec<PotentialSpec> {
    (0..=k_max)
        .flat_map(|k| canonical_supports(n, k, deg_cap))
        .map(|s| PotentialSpec::symbolic(n, s).expect("distinct monomials of degree >= 2"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Enumerate everything, then dedupe by orbit minimum on plain vectors.
    fn naive_count(n: usize, k_max: usize, deg_cap: u32) -> usize {
        let monos: Vec<Vec<u16>> =
            candidate_monomials(n, deg_cap).iter().map(|m| m.exponents().to_vec()).collect();
        let perms = permutations(n);
        let mut seen: HashSet<Vec<Vec<u16>>> = HashSet::new();
        fn subsets(len: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if len < k {
                return vec![];
            }
            let mut with: Vec<Vec<usize>> = subsets(len - 1, k - 1);
            for s in &mut with {
                s.push(len - 1);
            }
            with.extend(subsets(len - 1, k));
            with
        }
        for k in 0..=k_max {
            for s in subsets(monos.len(), k) {
                let orbit_min = perms
                    .iter()
                    .map(|p| {
                        let mut img: Vec<Vec<u16>> = s
                            .iter()
                            .map(|&i| {
                                let mut e = vec![0u16; n];
                                for (a, &x) in monos[i].iter().enumerate() {
                                    e[p[a]] = x;
                                }
                                e
                            })
                            .collect();
                        img.sort();
                        img
                    })
                    .min()
                    .unwrap();
                seen.insert(orbit_min);
            }
        }
        seen.len()
    }

    #[test]
    fn small_enumerations() {
        let s: Vec<String> = enumerate_supports(2, 1, 2).iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["1 + x1 + x2", "1 + x1 + x2 + a1*x1^2", "1 + x1 + x2 + b12*x1*x2"]);
        let full = enumerate_supports(2, 3, 2);
        assert_eq!(full.len(), 6);
        assert!(full.iter().any(|p| p.codimension() == 3));
    }

    #[test]
    fn count_matches_naive_dedupe() {
        assert_eq!(naive_count(2, 3, 3), 36);
        assert_eq!(enumerate_supports(2, 3, 3).len(), 36);
        assert_eq!(enumerate_supports(3, 2, 3).len(), naive_count(3, 2, 3));
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(1), vec![vec![0]]);
    }
}
