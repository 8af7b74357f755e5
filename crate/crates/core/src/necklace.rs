//! k-subsets of `[n]`, rotated Gale orders, Grassmann necklaces and juggling patterns.
//!
//! Every residue mod `n` is represented in `[n] = {1, ..., n}`; `n` stands for the
//! zero class. A necklace is stored as the tuple `(I_1, ..., I_n)` and satisfies
//! `I_a \ {a} ⊆ I_{a+1}` cyclically.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_kn, invalid, Error, Result};

/// Representative of `x mod n` in `[n]`.
pub fn residue(x: i64, n: usize) -> usize {
    let n = n as i64;
    let r = x.rem_euclid(n);
    if r == 0 {
        n as usize
    } else {
        r as usize
    }
}

/// Position of `x` in the rotated order `a <_a a+1 <_a ... <_a a-1`, starting at 0.
#[inline]
pub fn rotated_pos(a: usize, x: usize, n: usize) -> usize {
    (x + n - a) % n
}

/// A `k`-element subset of `[n]`, stored strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KSubset {
    n: usize,
    elems: Vec<usize>,
}

impl KSubset {
    pub fn new(n: usize, mut elems: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return invalid("ambient size n must be positive");
        }
        elems.sort_unstable();
        if elems.windows(2).any(|w| w[0] == w[1]) {
            return invalid(format!("repeated element in {elems:?}"));
        }
        if let Some(&bad) = elems.iter().find(|&&x| x < 1 || x > n) {
            return invalid(format!("element {bad} outside [1, {n}]"));
        }
        Ok(Self { n, elems })
    }

    /// Builds from elements that are already known to be distinct and in range.
    pub(crate) fn from_sorted_unchecked(n: usize, elems: Vec<usize>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        Self { n, elems }
    }

    /// Builds from arbitrary residues, reducing each into `[n]`.
    pub fn from_residues(n: usize, xs: impl IntoIterator<Item = i64>) -> Result<Self> {
        Self::new(n, xs.into_iter().map(|x| residue(x, n)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.elems.len()
    }

    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    /// Elements sorted increasingly in the rotated order `<_a`.
    pub fn sorted_from(&self, a: usize) -> Vec<usize> {
        let mut v = self.elems.clone();
        v.sort_unstable_by_key(|&x| rotated_pos(a, x, self.n));
        v
    }

    pub fn is_subset_of(&self, other: &KSubset) -> bool {
        self.elems.iter().all(|&x| other.contains(x))
    }

    fn without(&self, x: usize) -> Vec<usize> {
        self.elems.iter().copied().filter(|&y| y != x).collect()
    }
}

impl fmt::Display for KSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n < 10 {
            for x in &self.elems {
                write!(f, "{x}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.elems.iter().map(|x| x.to_string()).collect();
            write!(f, "{{{}}}", parts.join(","))
        }
    }
}

impl Serialize for KSubset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.elems.serialize(s)
    }
}

/// All `k`-subsets of `[n]` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<KSubset> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(KSubset::from_sorted_unchecked(n, cur.clone()));
        // advance to the next combination
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

fn check_same_shape(s: &KSubset, t: &KSubset) -> Result<()> {
    if s.n != t.n || s.k() != t.k() {
        return invalid(format!(
            "subsets of different shape: (k={}, n={}) vs (k={}, n={})",
            s.k(),
            s.n,
            t.k(),
            t.n
        ));
    }
    Ok(())
}

/// Gale order for `<_a`: after sorting both sets in `<_a`, every slot of `s` is
/// `<=_a` the matching slot of `t`.
pub fn rotated_leq(a: usize, s: &KSubset, t: &KSubset) -> Result<bool> {
    check_same_shape(s, t)?;
    if a < 1 || a > s.n {
        return invalid(format!("vertex {a} outside [1, {}]", s.n));
    }
    Ok(gale_leq_unchecked(a, s, t))
}

pub(crate) fn gale_leq_unchecked(a: usize, s: &KSubset, t: &KSubset) -> bool {
    let n = s.n;
    let mut sp: Vec<usize> = s.elems.iter().map(|&x| rotated_pos(a, x, n)).collect();
    let mut tp: Vec<usize> = t.elems.iter().map(|&x| rotated_pos(a, x, n)).collect();
    sp.sort_unstable();
    tp.sort_unstable();
    sp.iter().zip(&tp).all(|(x, y)| x <= y)
}

/// A `(k, n)` Grassmann necklace `(I_1, ..., I_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Necklace {
    n: usize,
    k: usize,
    entries: Vec<KSubset>,
}

fn check_tuple_shape(n: usize, k: usize, entries: &[KSubset]) -> Result<()> {
    if entries.len() != n {
        return invalid(format!("expected {n} entries, got {}", entries.len()));
    }
    if let Some(e) = entries.iter().find(|e| e.n != n || e.k() != k) {
        return invalid(format!("entry {e} is not a {k}-subset of [{n}]"));
    }
    Ok(())
}

impl Necklace {
    pub fn new(n: usize, k: usize, entries: Vec<KSubset>) -> Result<Self> {
        check_kn(k, n)?;
        check_tuple_shape(n, k, &entries)?;
        for a in 1..=n {
            let cur = &entries[a - 1];
            let next = &entries[a % n];
            if let Some(&i) = cur.elems.iter().find(|&&i| i != a && !next.contains(i)) {
                return invalid(format!(
                    "not a necklace: {i} in I_{a} \\ {{{a}}} but not in I_{}",
                    a % n + 1
                ));
            }
        }
        Ok(Self { n, k, entries })
    }

    /// Convenience constructor from raw element lists.
    pub fn from_lists(n: usize, lists: &[&[usize]]) -> Result<Self> {
        let k = lists.first().map_or(0, |l| l.len());
        let entries = lists
            .iter()
            .map(|l| KSubset::new(n, l.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, k, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `I_a` for `a` taken mod `n`.
    pub fn entry(&self, a: i64) -> &KSubset {
        &self.entries[residue(a, self.n) - 1]
    }

    pub fn entries(&self) -> &[KSubset] {
        &self.entries
    }

    /// Number of distinct entries; for `k = 1` the cell dimension is `n` minus this.
    pub fn distinct_entries(&self) -> usize {
        let mut v: Vec<&KSubset> = self.entries.iter().collect();
        v.sort();
        v.dedup();
        v.len()
    }
}

impl fmt::Display for Necklace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.k == 1 && self.n < 10 { "" } else { " " };
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Parses the compact notation: `"133"` for `k = 1`, or groups separated by
/// whitespace or `|` such as `"12 23 34 14"`. Groups may also be written as
/// comma lists, `"1,3|3,4|3,4|1,4"`.
impl FromStr for Necklace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lists = parse_groups(s)?;
        let n = lists.len();
        let refs: Vec<&[usize]> = lists.iter().map(|v| v.as_slice()).collect();
        Necklace::from_lists(n, &refs)
    }
}

pub(crate) fn parse_groups(s: &str) -> Result<Vec<Vec<usize>>> {
    let s = s.trim();
    let grouped = s.contains('|') || s.contains(char::is_whitespace);
    let groups: Vec<&str> = if grouped {
        s.split(|c: char| c == '|' || c.is_whitespace())
            .filter(|g| !g.is_empty())
            .collect()
    } else {
        // one singleton per character
        s.char_indices()
            .map(|(i, c)| &s[i..i + c.len_utf8()])
            .collect()
    };
    if groups.is_empty() {
        return invalid("empty necklace string");
    }
    groups
        .iter()
        .map(|g| {
            let g = g.trim_matches(|c| c == '{' || c == '}');
            let parsed: std::result::Result<Vec<usize>, _> = if g.contains(',') {
                g.split(',').map(|x| x.trim().parse::<usize>()).collect()
            } else {
                g.chars().map(|c| c.to_string().parse::<usize>()).collect()
            };
            parsed.map_err(|_| Error::InvalidArgument(format!("cannot parse group '{g}'")))
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct RawTuple {
    n: usize,
    k: usize,
    entries: Vec<Vec<usize>>,
}

fn raw_entries(n: usize, raw: Vec<Vec<usize>>) -> Result<Vec<KSubset>> {
    raw.into_iter().map(|e| KSubset::new(n, e)).collect()
}

impl Serialize for Necklace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawTuple {
            n: self.n,
            k: self.k,
            entries: self.entries.iter().map(|e| e.elems.clone()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Necklace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawTuple::deserialize(d)?;
        let entries = raw_entries(raw.n, raw.entries).map_err(serde::de::Error::custom)?;
        Necklace::new(raw.n, raw.k, entries).map_err(serde::de::Error::custom)
    }
}

/// `N1 <= N2` iff `I_a <=_a J_a` for every `a`.
pub fn necklace_leq(n1: &Necklace, n2: &Necklace) -> Result<bool> {
    if n1.n != n2.n || n1.k != n2.k {
        return invalid("necklaces of different (k, n)");
    }
    Ok(necklace_leq_unchecked(n1, n2))
}

pub(crate) fn necklace_leq_unchecked(n1: &Necklace, n2: &Necklace) -> bool {
    (1..=n1.n).all(|a| gale_leq_unchecked(a, &n1.entries[a - 1], &n2.entries[a - 1]))
}

/// Every `(k, n)` Grassmann necklace, lexicographic in `(I_1, I_2, ...)`.
pub fn enumerate_necklaces(k: usize, n: usize) -> Result<Vec<Necklace>> {
    check_kn(k, n)?;
    let starts = k_subsets(n, k);
    let out: Vec<Vec<Necklace>> = starts
        .into_par_iter()
        .map(|first| {
            let mut found = Vec::new();
            let mut stack = vec![first];
            extend_necklace(n, k, &mut stack, &mut found);
            found
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

fn extend_necklace(n: usize, k: usize, prefix: &mut Vec<KSubset>, out: &mut Vec<Necklace>) {
    let a = prefix.len();
    let cur = &prefix[a - 1];
    if a == n {
        if cur.without(n).iter().all(|&i| prefix[0].contains(i)) {
            out.push(Necklace {
                n,
                k,
                entries: prefix.clone(),
            });
        }
        return;
    }
    // a is 1-based here: cur = I_a
    let candidates: Vec<KSubset> = if !cur.contains(a) {
        vec![cur.clone()]
    } else {
        let kept = cur.without(a);
        let mut c: Vec<KSubset> = (1..=n)
            .filter(|b| !kept.contains(b))
            .map(|b| {
                let mut e = kept.clone();
                e.push(b);
                e.sort_unstable();
                KSubset::from_sorted_unchecked(n, e)
            })
            .collect();
        c.sort();
        c
    };
    for c in candidates {
        prefix.push(c);
        extend_necklace(n, k, prefix, out);
        prefix.pop();
    }
}

/// A juggling pattern `(J_1, ..., J_n)`: `j ∈ J_a \ {n}` implies `j + 1 ∈ J_{a+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JugglingPattern {
    n: usize,
    k: usize,
    entries: Vec<KSubset>,
}

impl JugglingPattern {
    pub fn new(n: usize, k: usize, entries: Vec<KSubset>) -> Result<Self> {
        check_kn(k, n)?;
        check_tuple_shape(n, k, &entries)?;
        for a in 1..=n {
            let next = &entries[a % n];
            if let Some(&j) = entries[a - 1]
                .elems
                .iter()
                .find(|&&j| j != n && !next.contains(j + 1))
            {
                return invalid(format!(
                    "not a juggling pattern: {j} in J_{a} but {} not in J_{}",
                    j + 1,
                    a % n + 1
                ));
            }
        }
        Ok(Self { n, k, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[KSubset] {
        &self.entries
    }
}

impl Serialize for JugglingPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawTuple {
            n: self.n,
            k: self.k,
            entries: self.entries.iter().map(|e| e.elems.clone()).collect(),
        }
        .serialize(s)
    }
}

/// `J_a = { a - i mod n : i ∈ I_a }`.
///
/// The sign is `a - i` rather than `i - a`: only this choice turns the necklace
/// condition into the juggling condition.
pub fn necklace_to_juggling(nk: &Necklace) -> JugglingPattern {
    let n = nk.n;
    let entries = (1..=n)
        .map(|a| {
            KSubset::from_residues(
                n,
                nk.entries[a - 1].elems.iter().map(|&i| a as i64 - i as i64),
            )
            .expect("residues of distinct elements are distinct")
        })
        .collect();
    JugglingPattern {
        n,
        k: nk.k,
        entries,
    }
}

/// Inverse of [`necklace_to_juggling`]: `I_a = { a - j mod n : j ∈ J_a }`.
pub fn juggling_to_necklace(jp: &JugglingPattern) -> Result<Necklace> {
    // re-validate: a JugglingPattern may have been built by hand
    let jp = JugglingPattern::new(jp.n, jp.k, jp.entries.clone())?;
    let n = jp.n;
    let entries = (1..=n)
        .map(|a| {
            KSubset::from_residues(
                n,
                jp.entries[a - 1].elems.iter().map(|&j| a as i64 - j as i64),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Necklace::new(n, jp.k, entries).map_err(|e| Error::Inconsistent(e.to_string()))
}

/// The necklace of a set of bases: entry `a` is the `<=_a` Gale minimum.
pub fn necklace_of_bases(bases: &[KSubset], n: usize, k: usize) -> Result<Necklace> {
    if bases.is_empty() {
        return invalid("empty basis set");
    }
    if let Some(b) = bases.iter().find(|b| b.n != n || b.k() != k) {
        return invalid(format!("basis {b} is not a {k}-subset of [{n}]"));
    }
    let mut entries = Vec::with_capacity(n);
    for a in 1..=n {
        let min = bases
            .iter()
            .find(|cand| bases.iter().all(|other| gale_leq_unchecked(a, cand, other)))
            .ok_or(Error::NoGaleMinimum { vertex: a })?;
        entries.push(min.clone());
    }
    Necklace::new(n, k, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks(n: usize, v: &[usize]) -> KSubset {
        KSubset::new(n, v.to_vec()).unwrap()
    }

    fn nk(s: &str) -> Necklace {
        s.parse().unwrap()
    }

    #[test]
    fn residues_live_in_one_to_n() {
        assert_eq!(residue(0, 3), 3);
        assert_eq!(residue(-2, 3), 1);
        assert_eq!(residue(7, 3), 1);
        assert_eq!(residue(3, 3), 3);
    }

    #[test]
    fn rotated_leq_examples() {
        assert!(rotated_leq(1, &ks(4, &[1, 3]), &ks(4, &[2, 3])).unwrap());
        assert!(rotated_leq(3, &ks(3, &[3]), &ks(3, &[1])).unwrap());
        assert!(!rotated_leq(1, &ks(4, &[2, 3]), &ks(4, &[1, 4])).unwrap());
    }

    #[test]
    fn rotated_leq_brute_force_agrees() {
        // Oracle: compare the u-th smallest elements directly via a rank function.
        let n = 5;
        for k in 1..n {
            let subsets = k_subsets(n, k);
            for a in 1..=n {
                let rank = |x: usize| {
                    (0..n)
                        .position(|t| residue((a + t) as i64, n) == x)
                        .unwrap()
                };
                for s in &subsets {
                    for t in &subsets {
                        let mut sr: Vec<usize> = s.elems().iter().map(|&x| rank(x)).collect();
                        let mut tr: Vec<usize> = t.elems().iter().map(|&x| rank(x)).collect();
                        sr.sort();
                        tr.sort();
                        let expect = (0..k).all(|u| sr[u] <= tr[u]);
                        assert_eq!(rotated_leq(a, s, t).unwrap(), expect);
                    }
                }
            }
        }
    }

    #[test]
    fn rotated_leq_rejects_mismatched_shapes() {
        assert!(rotated_leq(1, &ks(4, &[1, 3]), &ks(4, &[2])).is_err());
        assert!(rotated_leq(1, &ks(4, &[1]), &ks(5, &[2])).is_err());
        assert!(rotated_leq(6, &ks(4, &[1]), &ks(4, &[2])).is_err());
    }

    #[test]
    fn necklace_leq_examples() {
        assert!(necklace_leq(&nk("123"), &nk("133")).unwrap());
        assert!(necklace_leq(&nk("111"), &nk("111")).unwrap());
        assert!(!necklace_leq(&nk("121"), &nk("223")).unwrap());
        assert!(!necklace_leq(&nk("223"), &nk("121")).unwrap());
        assert!(!necklace_leq(&nk("121"), &nk("133")).unwrap());
        assert!(!necklace_leq(&nk("133"), &nk("223")).unwrap());
        assert!(necklace_leq(&nk("123"), &nk("12|23|34|14")).is_err());
    }

    #[test]
    fn enumerates_the_seven_13_necklaces() {
        let all: Vec<String> = enumerate_necklaces(1, 3)
            .unwrap()
            .iter()
            .map(|x| x.to_string())
            .collect();
        assert_eq!(all, ["111", "121", "123", "133", "222", "223", "333"]);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 2..=5 {
            for k in 1..n {
                let subsets = k_subsets(n, k);
                let mut brute = Vec::new();
                let total = subsets.len().pow(n as u32);
                for mut code in 0..total {
                    let mut entries = Vec::new();
                    for _ in 0..n {
                        entries.push(subsets[code % subsets.len()].clone());
                        code /= subsets.len();
                    }
                    if let Ok(x) = Necklace::new(n, k, entries) {
                        brute.push(x);
                    }
                }
                brute.sort();
                assert_eq!(enumerate_necklaces(k, n).unwrap(), brute, "(k,n)=({k},{n})");
            }
        }
    }

    #[test]
    fn enumeration_rejects_bad_ranges() {
        assert!(enumerate_necklaces(0, 3).is_err());
        assert!(enumerate_necklaces(3, 3).is_err());
        assert!(enumerate_necklaces(9, 3).is_err());
    }

    #[test]
    fn one_n_count_is_two_to_n_minus_one() {
        assert_eq!(enumerate_necklaces(1, 2).unwrap().len(), 3);
        for n in 2..=7 {
            assert_eq!(enumerate_necklaces(1, n).unwrap().len(), (1 << n) - 1);
        }
    }

    #[test]
    fn juggling_examples() {
        let j = necklace_to_juggling(&nk("133"));
        let e: Vec<Vec<usize>> = j.entries().iter().map(|s| s.elems().to_vec()).collect();
        assert_eq!(e, vec![vec![3], vec![2], vec![3]]);

        let constant = JugglingPattern::new(3, 1, vec![ks(3, &[3]); 3]).unwrap();
        assert_eq!(juggling_to_necklace(&constant).unwrap(), nk("123"));

        let diag = nk("1234");
        assert!(necklace_to_juggling(&diag)
            .entries()
            .iter()
            .all(|e| e.elems() == [4]));
    }

    #[test]
    fn juggling_roundtrip_small() {
        for (k, n) in [(1, 3), (2, 4)] {
            for x in enumerate_necklaces(k, n).unwrap() {
                let j = necklace_to_juggling(&x);
                JugglingPattern::new(n, k, j.entries().to_vec()).unwrap();
                assert_eq!(juggling_to_necklace(&j).unwrap(), x);
            }
        }
    }

    #[test]
    fn invalid_juggling_is_rejected() {
        assert!(JugglingPattern::new(3, 1, vec![ks(3, &[1]), ks(3, &[1]), ks(3, &[3])]).is_err());
    }

    #[test]
    fn necklace_of_bases_examples() {
        for (k, n) in [(1, 3), (2, 4), (2, 5), (3, 6)] {
            let all = k_subsets(n, k);
            let got = necklace_of_bases(&all, n, k).unwrap();
            for a in 1..=n {
                let expect = KSubset::from_residues(n, (0..k).map(|t| (a + t) as i64)).unwrap();
                assert_eq!(got.entry(a as i64), &expect);
            }
        }
        let s = ks(4, &[2, 4]);
        let single = necklace_of_bases(std::slice::from_ref(&s), 4, 2).unwrap();
        assert!(single.entries().iter().all(|e| *e == s));

        assert_eq!(
            necklace_of_bases(&[ks(3, &[1]), ks(3, &[3])], 3, 1).unwrap(),
            nk("133")
        );
    }

    #[test]
    fn necklace_of_bases_errors() {
        assert!(necklace_of_bases(&[], 3, 1).is_err());
        // (1,4) and (2,3) are Gale-incomparable for <_1
        let err = necklace_of_bases(&[ks(4, &[1, 4]), ks(4, &[2, 3])], 4, 2).unwrap_err();
        assert_eq!(err, Error::NoGaleMinimum { vertex: 1 });
    }

    #[test]
    fn json_schema() {
        let x = nk("13|34|34|14");
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"n":4,"k":2,"entries":[[1,3],[3,4],[3,4],[1,4]]}"#);
        let back: Necklace = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(
            serde_json::from_str::<Necklace>(r#"{"n":3,"k":1,"entries":[[1],[2],[1]]}"#).is_ok()
        );
        assert!(
            serde_json::from_str::<Necklace>(r#"{"n":3,"k":1,"entries":[[2],[1],[3]]}"#).is_err()
        );
    }
}
