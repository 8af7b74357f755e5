//! Nilpotent representations of the equioriented cycle, the coefficient quiver of
//! `U_[n]`, successor-closed subquivers and their mutations.
//!
//! Everything here uses the basis `v_1^{(a)}, ..., v_n^{(a)}` at each vertex `a`,
//! with arrows `v_h^{(a)} -> v_{h+1}^{(a+1)}` and `v_n^{(a)} -> 0`. The segment
//! `U(j; n)` of `U_[n]` consists of the vectors `v_p^{(j+p)}`, `p = 1..n`.
//!
//! (In the other natural basis the arrow at `a` is the coordinate projection
//! killing `b_a`; it is not used in code.)

use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_kn, invalid, Result};
use crate::linalg::rank_sparse;
use crate::necklace::{k_subsets, residue, KSubset, Necklace};
use crate::poset::Poset;

/// A direct sum of indecomposables `U(i; l)`: length `l`, terminating at vertex `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SegmentRep {
    n: usize,
    segments: Vec<(usize, usize)>,
}

impl SegmentRep {
    pub fn new(n: usize, mut segments: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return invalid("cycle size must be positive");
        }
        for &(i, l) in &segments {
            if i < 1 || i > n {
                return invalid(format!("terminal vertex {i} outside [1, {n}]"));
            }
            if l < 1 || l > n {
                return invalid(format!("segment length {l} outside [1, {n}]"));
            }
        }
        segments.sort_unstable();
        Ok(Self { n, segments })
    }

    /// `U_[n] = ⊕_i U(i; n)`.
    pub fn full(n: usize) -> Self {
        Self {
            n,
            segments: (1..=n).map(|i| (i, n)).collect(),
        }
    }

    /// `U_J = ⊕_{j ∈ J} U(j; n)`.
    pub fn of_subset(j: &KSubset) -> Self {
        let n = j.n();
        Self {
            n,
            segments: j.elems().iter().map(|&i| (i, n)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn segments(&self) -> &[(usize, usize)] {
        &self.segments
    }

    /// Dimension of the space at vertex `v`.
    pub fn dim_at(&self, v: usize) -> usize {
        self.basis_at(v).len()
    }

    /// Basis at vertex `v` as `(segment index, position)`; position 0 is the start
    /// of the segment and `l - 1` its terminal vertex.
    fn basis_at(&self, v: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (s, &(i, l)) in self.segments.iter().enumerate() {
            // vertices i-l+1, ..., i carry positions 0, ..., l-1
            for t in 0..l {
                if residue(i as i64 - l as i64 + 1 + t as i64, self.n) == v {
                    out.push((s, t));
                }
            }
        }
        out
    }

    /// Image of the basis vector `(s, t)` under the arrow leaving its vertex.
    fn arrow(&self, s: usize, t: usize) -> Option<(usize, usize)> {
        let l = self.segments[s].1;
        (t + 1 < l).then_some((s, t + 1))
    }
}

impl Serialize for SegmentRep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            n: usize,
            segments: &'a [(usize, usize)],
        }
        Raw {
            n: self.n,
            segments: &self.segments,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SegmentRep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            segments: Vec<(usize, usize)>,
        }
        let raw = Raw::deserialize(d)?;
        SegmentRep::new(raw.n, raw.segments).map_err(serde::de::Error::custom)
    }
}

/// `dim Hom(M, N)`: nullity of the intertwiner system `E_{v+1} M_v = N_v E_v`.
pub fn hom_dim(m: &SegmentRep, nrep: &SegmentRep) -> Result<usize> {
    if m.n != nrep.n {
        return invalid(format!("cycle sizes differ: {} vs {}", m.n, nrep.n));
    }
    let n = m.n;
    let mb: Vec<Vec<(usize, usize)>> = (1..=n).map(|v| m.basis_at(v)).collect();
    let nb: Vec<Vec<(usize, usize)>> = (1..=n).map(|v| nrep.basis_at(v)).collect();

    // unknown E_v[r][c], r indexes N's basis at v, c indexes M's basis at v
    let mut offset = vec![0usize; n + 1];
    for v in 0..n {
        offset[v + 1] = offset[v] + nb[v].len() * mb[v].len();
    }
    let unknowns = offset[n];
    let var = |v: usize, r: usize, c: usize| offset[v] + r * mb[v].len() + c;

    let position = |basis: &[(usize, usize)], x: (usize, usize)| {
        basis
            .iter()
            .position(|&b| b == x)
            .expect("arrow image lies in the next vertex")
    };

    let one = BigRational::one();
    let mut rows = Vec::new();
    for v in 0..n {
        let w = (v + 1) % n;
        // entry (r, c) of E_w M_v - N_v E_v, r in N's basis at w, c in M's basis at v
        let m_img: Vec<Option<usize>> = mb[v]
            .iter()
            .map(|&(s, t)| m.arrow(s, t).map(|x| position(&mb[w], x)))
            .collect();
        // N_v maps basis r' at v to at most one basis vector at w
        let n_pre: Vec<Vec<usize>> = {
            let mut pre = vec![Vec::new(); nb[w].len()];
            for (rp, &(s, t)) in nb[v].iter().enumerate() {
                if let Some(x) = nrep.arrow(s, t) {
                    pre[position(&nb[w], x)].push(rp);
                }
            }
            pre
        };
        for (r, pre) in n_pre.iter().enumerate() {
            for (c, img) in m_img.iter().enumerate() {
                let mut row = Vec::new();
                if let Some(cp) = *img {
                    row.push((var(w, r, cp), one.clone()));
                }
                for &rp in pre {
                    row.push((var(v, rp, c), -one.clone()));
                }
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    Ok(unknowns - rank_sparse(unknowns, rows))
}

/// Dimension of `Gr_k(M_r)` for the degenerations `M_r`, `0 <= r <= n`:
/// the maximum of `k(n-k) + (k-l)(l-r) - l(n-k+l-r)` over the dimensions `l` a
/// `k`-dimensional subspace can have in the `r`-dimensional identity part, i.e.
/// `max(0, k+r-n) <= l <= min(k, r)`.
pub fn degeneration_dim(n: usize, k: usize, r: usize) -> Result<i64> {
    check_kn(k, n)?;
    if r > n {
        return invalid(format!("r = {r} outside [0, {n}]"));
    }
    let (n, k, r) = (n as i64, k as i64, r as i64);
    Ok(((k + r - n).max(0)..=r.min(k))
        .map(|l| k * (n - k) + (k - l) * (l - r) - l * (n - k + l - r))
        .max()
        .expect("range is nonempty"))
}

/// A successor-closed subquiver of `Q(U_[n])` with `k` vertices over each vertex:
/// rows `H_a ⊂ [n]` with `h ∈ H_a, h < n  =>  h + 1 ∈ H_{a+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SuccessorClosedSubquiver {
    n: usize,
    k: usize,
    rows: Vec<KSubset>,
}

impl SuccessorClosedSubquiver {
    pub fn new(n: usize, k: usize, rows: Vec<KSubset>) -> Result<Self> {
        check_kn(k, n)?;
        if rows.len() != n || rows.iter().any(|r| r.n() != n || r.k() != k) {
            return invalid(format!("need {n} rows of {k}-subsets of [{n}]"));
        }
        let q = Self { n, k, rows };
        if let Some((a, h)) = q.first_violation() {
            return invalid(format!(
                "not successor closed: v_{h}^({a}) present but v_{}^({}) missing",
                h + 1,
                a % n + 1
            ));
        }
        Ok(q)
    }

    fn first_violation(&self) -> Option<(usize, usize)> {
        let n = self.n;
        (1..=n).find_map(|a| {
            let next = &self.rows[a % n];
            self.rows[a - 1]
                .elems()
                .iter()
                .find(|&&h| h < n && !next.contains(h + 1))
                .map(|&h| (a, h))
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `H_a` for `a` taken mod `n`.
    pub fn row(&self, a: i64) -> &KSubset {
        &self.rows[residue(a, self.n) - 1]
    }

    pub fn rows(&self) -> &[KSubset] {
        &self.rows
    }

    pub fn contains(&self, a: i64, h: usize) -> bool {
        self.row(a).contains(h)
    }

    /// Positions `p` of segment `j` (vectors `v_p^{(j+p)}`) lying in the subquiver.
    pub fn segment_positions(&self, j: usize) -> Vec<usize> {
        (1..=self.n)
            .filter(|&p| self.contains((j + p) as i64, p))
            .collect()
    }
}

impl fmt::Display for SuccessorClosedSubquiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "{}", parts.join("|"))
    }
}

impl Serialize for SuccessorClosedSubquiver {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            n: usize,
            k: usize,
            rows: Vec<&'a [usize]>,
        }
        Raw {
            n: self.n,
            k: self.k,
            rows: self.rows.iter().map(|r| r.elems()).collect(),
        }
        .serialize(s)
    }
}

/// Every successor-closed subquiver of dimension `(k, ..., k)`, sorted by rows.
pub fn enumerate_sc_subquivers(k: usize, n: usize) -> Result<Vec<SuccessorClosedSubquiver>> {
    check_kn(k, n)?;
    let firsts = k_subsets(n, k);
    let parts: Vec<Vec<SuccessorClosedSubquiver>> = firsts
        .into_par_iter()
        .map(|h1| {
            let mut out = Vec::new();
            let mut rows = vec![h1];
            extend_rows(n, k, &mut rows, &mut out);
            out
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

fn extend_rows(
    n: usize,
    k: usize,
    rows: &mut Vec<KSubset>,
    out: &mut Vec<SuccessorClosedSubquiver>,
) {
    let last = rows.last().expect("nonempty");
    let forced: Vec<usize> = last
        .elems()
        .iter()
        .filter(|&&h| h < n)
        .map(|h| h + 1)
        .collect();
    if rows.len() == n {
        if forced.iter().all(|h| rows[0].contains(*h)) {
            out.push(SuccessorClosedSubquiver {
                n,
                k,
                rows: rows.clone(),
            });
        }
        return;
    }
    let mut candidates: Vec<KSubset> = if forced.len() == k {
        vec![KSubset::new(n, forced).expect("shifted distinct elements")]
    } else {
        (1..=n)
            .filter(|h| !forced.contains(h))
            .map(|h| {
                let mut e = forced.clone();
                e.push(h);
                KSubset::new(n, e).expect("distinct")
            })
            .collect()
    };
    candidates.sort();
    for c in candidates {
        rows.push(c);
        extend_rows(n, k, rows, out);
        rows.pop();
    }
}

/// `v_h^{(a)} ↦ a - h`, row by row.
pub fn psi(q: &SuccessorClosedSubquiver) -> Necklace {
    let n = q.n;
    let entries = (1..=n)
        .map(|a| {
            KSubset::from_residues(
                n,
                q.rows[a - 1].elems().iter().map(|&h| a as i64 - h as i64),
            )
            .expect("distinct residues")
        })
        .collect();
    Necklace::new(n, q.k, entries).expect("psi of a successor-closed subquiver is a necklace")
}

/// `H_a = { a - i : i ∈ I_a }`.
pub fn psi_inverse(nk: &Necklace) -> SuccessorClosedSubquiver {
    let n = nk.n();
    let rows = (1..=n)
        .map(|a| {
            KSubset::from_residues(
                n,
                nk.entry(a as i64)
                    .elems()
                    .iter()
                    .map(|&i| a as i64 - i as i64),
            )
            .expect("distinct residues")
        })
        .collect();
    SuccessorClosedSubquiver::new(n, nk.k(), rows)
        .expect("psi inverse of a necklace is successor closed")
}

/// One mutation: the first `len` vectors of the run of segment `source` starting at
/// `v_{start_pos}^{(start_vertex)}` move down by `shift` rows, landing in segment `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutation {
    pub source: usize,
    pub target: usize,
    pub start_vertex: usize,
    pub start_pos: usize,
    pub len: usize,
    pub shift: usize,
    pub result: SuccessorClosedSubquiver,
}

/// All subquivers reachable from `q` by a single mutation.
pub fn mutations(q: &SuccessorClosedSubquiver) -> Vec<Mutation> {
    let n = q.n;
    let mut out = Vec::new();
    for j in 1..=n {
        let pos = q.segment_positions(j);
        let Some(&p0) = pos.first() else { continue };
        debug_assert!(pos.iter().copied().eq(p0..=n), "segment runs are terminal");
        let a = residue((j + p0) as i64, n);
        let run_len = n - p0 + 1;
        for len in 1..=run_len {
            for shift in 1..=n {
                if p0 + len - 1 + shift > n {
                    break;
                }
                let free = (0..len).all(|t| !q.contains((a + t) as i64, p0 + t + shift));
                if !free {
                    continue;
                }
                let mut rows = q.rows.clone();
                for t in 0..len {
                    let v = residue((a + t) as i64, n) - 1;
                    let mut e: Vec<usize> = rows[v]
                        .elems()
                        .iter()
                        .copied()
                        .filter(|&h| h != p0 + t)
                        .collect();
                    e.push(p0 + t + shift);
                    rows[v] = KSubset::new(n, e).expect("target slot was free");
                }
                if let Ok(result) = SuccessorClosedSubquiver::new(n, q.k, rows) {
                    out.push(Mutation {
                        source: j,
                        target: residue(j as i64 - shift as i64, n),
                        start_vertex: a,
                        start_pos: p0,
                        len,
                        shift,
                        result,
                    });
                }
            }
        }
    }
    out
}

/// Reflexive-transitive closure of the mutation relation, indexed by the canonical
/// necklace enumeration `necklaces` (which must be sorted).
pub fn closure_poset(k: usize, n: usize) -> Result<(Vec<Necklace>, Poset)> {
    let necklaces = crate::necklace::enumerate_necklaces(k, n)?;
    let index = |x: &Necklace| {
        necklaces
            .binary_search(x)
            .expect("psi lands in the enumeration")
    };
    let quivers = enumerate_sc_subquivers(k, n)?;
    let mut edges = Vec::new();
    for q in &quivers {
        let src = index(&psi(q));
        for m in mutations(q) {
            edges.push((src, index(&psi(&m.result))));
        }
    }
    let poset = Poset::closure_of(necklaces.len(), &edges);
    Ok((necklaces, poset))
}
