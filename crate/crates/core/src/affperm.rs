//! Bounded affine permutations and their bijection with Grassmann necklaces.
//!
//! A `(k, n)` bounded affine permutation `f: Z -> Z` is stored by its window
//! `[f(1), ..., f(n)]`; the rest is recovered from `f(i + n) = f(i) + n`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::necklace::{residue, KSubset, Necklace};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BoundedAffinePermutation {
    n: usize,
    k: usize,
    window: Vec<i64>,
}

impl BoundedAffinePermutation {
    pub fn new(n: usize, k: usize, window: Vec<i64>) -> Result<Self> {
        if n == 0 || k > n {
            return invalid(format!("need 0 <= k <= n and n > 0, got k={k}, n={n}"));
        }
        if window.len() != n {
            return invalid(format!("window has {} values, expected {n}", window.len()));
        }
        let mut seen = vec![false; n];
        for (idx, &v) in window.iter().enumerate() {
            let i = idx as i64 + 1;
            if v < i || v > i + n as i64 {
                return invalid(format!(
                    "f({i}) = {v} violates {i} <= f(i) <= {}",
                    i + n as i64
                ));
            }
            let r = residue(v, n) - 1;
            if seen[r] {
                return invalid(format!("f is not a bijection: residue of {v} repeats"));
            }
            seen[r] = true;
        }
        let excess: i64 = window
            .iter()
            .enumerate()
            .map(|(idx, &v)| v - (idx as i64 + 1))
            .sum();
        if excess != (k * n) as i64 {
            return invalid(format!(
                "sum of f(i) - i is {excess}, expected k*n = {}",
                k * n
            ));
        }
        Ok(Self { n, k, window })
    }

    /// Reads `k` off the window as `sum(f(i) - i) / n`.
    pub fn from_window(window: Vec<i64>) -> Result<Self> {
        let n = window.len();
        if n == 0 {
            return invalid("empty window");
        }
        let excess: i64 = window
            .iter()
            .enumerate()
            .map(|(idx, &v)| v - (idx as i64 + 1))
            .sum();
        if excess < 0 || excess % n as i64 != 0 {
            return invalid(format!(
                "sum of f(i) - i = {excess} is not a multiple of n = {n}"
            ));
        }
        Self::new(n, (excess / n as i64) as usize, window)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn window(&self) -> &[i64] {
        &self.window
    }

    /// `f(i)` for any integer `i`.
    pub fn apply(&self, i: i64) -> i64 {
        let n = self.n as i64;
        let r = residue(i, self.n) as i64;
        let shift = (i - r) / n;
        self.window[(r - 1) as usize] + shift * n
    }
}

impl<'de> Deserialize<'de> for BoundedAffinePermutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            k: usize,
            window: Vec<i64>,
        }
        let raw = Raw::deserialize(d)?;
        Self::new(raw.n, raw.k, raw.window).map_err(serde::de::Error::custom)
    }
}

/// `id_k(i) = i + k`.
pub fn identity_k(k: usize, n: usize) -> BoundedAffinePermutation {
    BoundedAffinePermutation {
        n,
        k,
        window: (1..=n as i64).map(|i| i + k as i64).collect(),
    }
}

/// The bounded affine permutation of a necklace.
///
/// `f(a) = a` when `a ∉ I_a`; otherwise `I_{a+1} = I_a \ {a} ∪ {b}` and `f(a)` is
/// the lift of `b` into `(a, a + n]`.
pub fn from_necklace(nk: &Necklace) -> Result<BoundedAffinePermutation> {
    let n = nk.n();
    let mut window = Vec::with_capacity(n);
    for a in 1..=n {
        let cur = nk.entry(a as i64);
        let next = nk.entry(a as i64 + 1);
        if !cur.contains(a) {
            window.push(a as i64);
            continue;
        }
        let kept: Vec<usize> = cur.elems().iter().copied().filter(|&x| x != a).collect();
        let new: Vec<usize> = next
            .elems()
            .iter()
            .copied()
            .filter(|x| !kept.contains(x))
            .collect();
        if new.len() != 1 || kept.iter().any(|x| !next.contains(*x)) {
            return invalid(format!("entries I_{a}, I_{} are inconsistent", a % n + 1));
        }
        let b = new[0] as i64;
        // lift b into (a, a + n]
        let c = a as i64 + residue(b - a as i64, n) as i64;
        window.push(c);
    }
    BoundedAffinePermutation::new(n, nk.k(), window).map_err(|e| {
        Error::Inconsistent(format!(
            "necklace {nk} produced an invalid permutation: {e}"
        ))
    })
}

/// `I_a = { f(b) mod n : b < a, f(b) >= a }`; `b` ranges over `[a - n, a - 1]`
/// since `f(b) <= b + n < a` for smaller `b`.
pub fn to_necklace(f: &BoundedAffinePermutation) -> Result<Necklace> {
    let n = f.n;
    let mut entries = Vec::with_capacity(n);
    for a in 1..=n as i64 {
        let vals: Vec<i64> = (a - n as i64..a)
            .map(|b| f.apply(b))
            .filter(|&v| v >= a)
            .collect();
        entries.push(KSubset::from_residues(n, vals)?);
    }
    Necklace::new(n, f.k, entries)
}

/// Inversion count `#{(i, j) ∈ [n] × Z : i < j, f(i) > f(j)}`.
///
/// Only `j < i + n` can contribute: for `j >= i + n`, `f(j) >= j >= i + n >= f(i)`.
pub fn length(f: &BoundedAffinePermutation) -> usize {
    let n = f.n as i64;
    let mut count = 0;
    for i in 1..=n {
        let fi = f.apply(i);
        for j in i + 1..i + n {
            if fi > f.apply(j) {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::necklace::enumerate_necklaces;

    fn nk(s: &str) -> Necklace {
        s.parse().unwrap()
    }

    /// Oracle: count inversions over a generous finite range of j.
    fn length_brute(f: &BoundedAffinePermutation) -> usize {
        let n = f.n() as i64;
        let mut c = 0;
        for i in 1..=n {
            for j in i + 1..=i + 4 * n {
                if f.apply(i) > f.apply(j) {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn identity_examples() {
        assert_eq!(identity_k(2, 4).window(), &[3, 4, 5, 6]);
        assert_eq!(identity_k(0, 3).window(), &[1, 2, 3]);
        for n in 1..=6 {
            for k in 0..=n {
                let id = identity_k(k, n);
                BoundedAffinePermutation::new(n, k, id.window().to_vec()).unwrap();
                assert_eq!(length(&id), 0);
            }
        }
    }

    #[test]
    fn from_necklace_examples() {
        assert_eq!(from_necklace(&nk("111")).unwrap().window(), &[4, 2, 3]);
        assert_eq!(
            from_necklace(&nk("12|12|13|12")).unwrap().window(),
            &[5, 3, 6, 4]
        );
        for (k, n) in [(1, 3), (2, 4), (2, 5), (3, 6)] {
            let lists: Vec<Vec<usize>> = (1..=n)
                .map(|a| (0..k).map(|t| residue((a + t) as i64, n)).collect())
                .collect();
            let refs: Vec<&[usize]> = lists.iter().map(|v| v.as_slice()).collect();
            let x = Necklace::from_lists(n, &refs).unwrap();
            assert_eq!(from_necklace(&x).unwrap(), identity_k(k, n));
        }
    }

    #[test]
    fn to_necklace_examples() {
        assert_eq!(to_necklace(&identity_k(2, 4)).unwrap(), nk("12|23|34|14"));
        let f = BoundedAffinePermutation::new(3, 1, vec![4, 2, 3]).unwrap();
        assert_eq!(to_necklace(&f).unwrap(), nk("111"));
    }

    #[test]
    fn length_examples() {
        let f = from_necklace(&nk("13|34|34|14")).unwrap();
        assert_eq!(f.window(), &[4, 2, 5, 7]);
        assert_eq!(length(&f), 2);
        let g = BoundedAffinePermutation::new(3, 1, vec![4, 2, 3]).unwrap();
        assert_eq!(length(&g), 2);
    }

    #[test]
    fn roundtrips_and_length_oracle() {
        for n in 2..=5 {
            for k in 1..n {
                for x in enumerate_necklaces(k, n).unwrap() {
                    let f = from_necklace(&x).unwrap();
                    assert_eq!(to_necklace(&f).unwrap(), x);
                    assert_eq!(from_necklace(&to_necklace(&f).unwrap()).unwrap(), f);
                    let l = length(&f);
                    assert_eq!(l, length_brute(&f));
                    assert!(l <= k * (n - k));
                }
            }
        }
    }

    #[test]
    fn thirteen_permutations_and_lengths() {
        // necklaces of (1,3) with their bounded permutations and lengths
        let table = [
            ("111", [4, 2, 3], 2),
            ("222", [1, 5, 3], 2),
            ("333", [1, 2, 6], 2),
            ("121", [2, 4, 3], 1),
            ("133", [3, 2, 4], 1),
            ("223", [1, 3, 5], 1),
            ("123", [2, 3, 4], 0),
        ];
        for (s, w, l) in table {
            let f = from_necklace(&nk(s)).unwrap();
            assert_eq!(f.window(), &w, "{s}");
            assert_eq!(length(&f), l, "{s}");
        }
    }

    #[test]
    fn invariants_are_enforced() {
        assert!(BoundedAffinePermutation::new(3, 1, vec![4, 2, 4]).is_err());
        assert!(BoundedAffinePermutation::new(3, 1, vec![0, 2, 7]).is_err());
        assert!(BoundedAffinePermutation::new(3, 2, vec![4, 2, 3]).is_err());
        assert!(BoundedAffinePermutation::from_window(vec![4, 2, 3]).is_ok());
        assert!(serde_json::from_str::<BoundedAffinePermutation>(
            r#"{"n":3,"k":1,"window":[4,2,3]}"#
        )
        .is_ok());
    }
}
