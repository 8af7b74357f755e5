//! Brute-force point counts of `X(k, n)` over prime fields.
//!
//! A point is a tuple `(V_1, ..., V_n)` of `k`-dimensional subspaces of `F_p^n`
//! with `s(V_a) ⊆ V_{a+1}` cyclically, where `s` is the nilpotent shift
//! `v_j ↦ v_{j+1}`, `v_n ↦ 0`. Points are sorted into isomorphism classes by the
//! ranks of the iterated shift, which determine the segment decomposition.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::necklace::{
    enumerate_necklaces, juggling_to_necklace, necklace_to_juggling, residue, JugglingPattern,
    KSubset, Necklace,
};
use crate::quiver::SegmentRep;

pub fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

fn check_prime(p: u32) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        invalid(format!("{p} is not prime"))
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // Fermat
    let (mut base, mut e, mut acc) = (a as u64 % p as u64, p as u64 - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// A matrix over `F_p`; subspaces are stored as the row span in reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrimeFieldMatrix {
    p: u32,
    cols: usize,
    rows: Vec<Vec<u32>>,
}

impl PrimeFieldMatrix {
    pub fn new(p: u32, cols: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        check_prime(p)?;
        if rows.iter().any(|r| r.len() != cols) {
            return invalid(format!("every row must have {cols} entries"));
        }
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x % p).collect())
            .collect();
        Ok(Self { p, cols, rows })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Reduced row echelon form with zero rows dropped.
    pub fn rref(&self) -> Self {
        let p = self.p as u64;
        let mut m = self.rows.clone();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(piv) = (r..m.len()).find(|&i| m[i][c] != 0) else {
                continue;
            };
            m.swap(r, piv);
            let inv = inv_mod(m[r][c], self.p) as u64;
            for x in m[r].iter_mut() {
                *x = (*x as u64 * inv % p) as u32;
            }
            for i in 0..m.len() {
                if i != r && m[i][c] != 0 {
                    let f = m[i][c] as u64;
                    let pivot_row = m[r].clone();
                    for (x, &y) in m[i].iter_mut().zip(&pivot_row) {
                        *x = ((*x as u64 + (p - f) * y as u64) % p) as u32;
                    }
                }
            }
            r += 1;
        }
        m.truncate(r);
        Self {
            p: self.p,
            cols: self.cols,
            rows: m,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rows.len()
    }

    /// Pivot columns of a matrix already in reduced row echelon form.
    fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .position(|&x| x != 0)
                    .expect("no zero rows in echelon form")
            })
            .collect()
    }

    fn stacked(&self, other: &Self) -> Self {
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Self {
            p: self.p,
            cols: self.cols,
            rows,
        }
    }

    /// Whether the row span of `other` lies in the row span of `self` (both echelon).
    pub fn span_contains(&self, other: &Self) -> bool {
        self.stacked(other).rank() == self.rows.len()
    }

    /// Image of the row span under `v_j ↦ v_{j+1}`, `v_n ↦ 0`, in echelon form.
    pub fn shifted(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut s = vec![0; self.cols];
                s[1..].copy_from_slice(&r[..self.cols - 1]);
                s
            })
            .collect();
        Self {
            p: self.p,
            cols: self.cols,
            rows,
        }
        .rref()
    }
}

/// All `k`-dimensional subspaces of `F_p^m`, as echelon matrices.
pub fn subspaces(p: u32, m: usize, k: usize) -> Vec<PrimeFieldMatrix> {
    if k == 0 {
        return vec![PrimeFieldMatrix {
            p,
            cols: m,
            rows: Vec::new(),
        }];
    }
    let mut out = Vec::new();
    for piv in crate::necklace::k_subsets(m, k) {
        let pivots: Vec<usize> = piv.elems().iter().map(|x| x - 1).collect();
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &c)| {
                (c + 1..m)
                    .filter(|x| !pivots.contains(x))
                    .map(move |x| (r, x))
            })
            .collect();
        let mut vals = vec![0u32; free.len()];
        loop {
            let mut rows = vec![vec![0u32; m]; k];
            for (r, &c) in pivots.iter().enumerate() {
                rows[r][c] = 1;
            }
            for (&(r, c), &v) in free.iter().zip(&vals) {
                rows[r][c] = v;
            }
            out.push(PrimeFieldMatrix { p, cols: m, rows });
            // odometer
            let Some(pos) = vals.iter().position(|&v| v + 1 < p) else {
                break;
            };
            vals[pos] += 1;
            for v in &mut vals[..pos] {
                *v = 0;
            }
        }
    }
    out
}

/// All `k`-dimensional subspaces containing the echelon subspace `w`, built from
/// subspaces of the quotient by `w` (coordinates on its non-pivot columns).
pub fn superspaces(w: &PrimeFieldMatrix, k: usize) -> Vec<PrimeFieldMatrix> {
    let d = w.rows.len();
    if k < d {
        return Vec::new();
    }
    let pivots = w.pivots();
    let rest: Vec<usize> = (0..w.cols).filter(|c| !pivots.contains(c)).collect();
    subspaces(w.p, rest.len(), k - d)
        .into_iter()
        .map(|u| {
            let lifted = u.rows.iter().map(|r| {
                let mut v = vec![0u32; w.cols];
                for (t, &c) in rest.iter().enumerate() {
                    v[c] = r[t];
                }
                v
            });
            let mut rows = w.rows.clone();
            rows.extend(lifted);
            PrimeFieldMatrix {
                p: w.p,
                cols: w.cols,
                rows,
            }
            .rref()
        })
        .collect()
}

/// Gaussian binomial `[m choose r]_p`.
pub fn gaussian_binomial(m: usize, r: usize, p: u64) -> u64 {
    if r > m {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..r as u32 {
        num *= p.pow(m as u32 - i) - 1;
        den *= p.pow(i + 1) - 1;
    }
    num / den
}

/// A point of `X(k, n)` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RepPoint {
    n: usize,
    k: usize,
    p: u32,
    spaces: Vec<PrimeFieldMatrix>,
}

impl RepPoint {
    pub fn new(k: usize, n: usize, p: u32, spaces: Vec<PrimeFieldMatrix>) -> Result<Self> {
        check_prime(p)?;
        if spaces.len() != n {
            return invalid(format!("expected {n} subspaces, got {}", spaces.len()));
        }
        let spaces: Vec<PrimeFieldMatrix> = spaces.into_iter().map(|s| s.rref()).collect();
        for (a, s) in spaces.iter().enumerate() {
            if s.p != p || s.cols != n || s.rows.len() != k {
                return invalid(format!(
                    "V_{} is not a {k}-dimensional subspace of F_{p}^{n}",
                    a + 1
                ));
            }
        }
        for a in 0..n {
            if !spaces[(a + 1) % n].span_contains(&spaces[a].shifted()) {
                return invalid(format!(
                    "s(V_{}) is not contained in V_{}",
                    a + 1,
                    (a + 1) % n + 1
                ));
            }
        }
        Ok(Self { n, k, p, spaces })
    }

    /// The coordinate point `V_a = span{v_j : j ∈ J_a}` of a juggling pattern.
    pub fn coordinate(jp: &JugglingPattern, p: u32) -> Result<Self> {
        let n = jp.n();
        let spaces = jp
            .entries()
            .iter()
            .map(|s| {
                let rows = s
                    .elems()
                    .iter()
                    .map(|&j| {
                        let mut v = vec![0; n];
                        v[j - 1] = 1;
                        v
                    })
                    .collect();
                PrimeFieldMatrix::new(p, n, rows)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(jp.k(), n, p, spaces)
    }

    pub fn spaces(&self) -> &[PrimeFieldMatrix] {
        &self.spaces
    }

    /// `R[a - 1][m] = dim s^m(V_a)` for `m = 0..=n`.
    pub fn rank_profile(&self) -> Vec<Vec<usize>> {
        rank_profile(&self.spaces)
    }
}

fn rank_profile(spaces: &[PrimeFieldMatrix]) -> Vec<Vec<usize>> {
    spaces
        .iter()
        .map(|v| {
            let mut out = Vec::with_capacity(v.cols + 1);
            let mut cur = v.clone();
            out.push(cur.rows.len());
            for _ in 0..v.cols {
                cur = cur.shifted();
                out.push(cur.rows.len());
            }
            out
        })
        .collect()
}

/// Recovers the segments from ranks `R[a - 1][m] = dim s^m(V_a)`, `m = 0..=n`.
///
/// The number of segments starting at `a` and surviving exactly `m` steps is
/// `R(a, m) - R(a, m+1) - R(a-1, m+1) + R(a-1, m+2)`: elements at `a` with
/// remaining life `m`, minus those already present at `a - 1`.
pub fn segments_from_profile(n: usize, profile: &[Vec<usize>]) -> Result<SegmentRep> {
    let r = |a: i64, m: usize| -> i64 {
        profile[residue(a, n) - 1].get(m).copied().unwrap_or(0) as i64
    };
    let mut segs = Vec::new();
    for a in 1..=n as i64 {
        for m in 0..n {
            let mult = r(a, m) - r(a, m + 1) - r(a - 1, m + 1) + r(a - 1, m + 2);
            if mult < 0 {
                return Err(Error::Inconsistent(format!(
                    "negative multiplicity at start {a}, length {}",
                    m + 1
                )));
            }
            // U(i; l) ends at i = a + m and has length l = m + 1
            for _ in 0..mult {
                segs.push((residue(a + m as i64, n), m + 1));
            }
        }
    }
    SegmentRep::new(n, segs)
}

/// Rank profile of an abstract direct sum of segments, computed by following
/// each basis vector along its segment.
pub fn profile_of_segments(rep: &SegmentRep) -> Vec<Vec<usize>> {
    let n = rep.n();
    let mut prof = vec![vec![0usize; n + 1]; n];
    for &(i, l) in rep.segments() {
        let start = i as i64 - l as i64 + 1;
        for t in 0..l {
            let a = residue(start + t as i64, n);
            let life = l - 1 - t;
            for slot in &mut prof[a - 1][..=life] {
                *slot += 1;
            }
        }
    }
    prof
}

/// Maps segment decompositions to necklaces via the coordinate points.
pub struct Classifier {
    n: usize,
    table: HashMap<SegmentRep, Necklace>,
}

impl Classifier {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        let mut table = HashMap::new();
        for v in enumerate_necklaces(k, n)? {
            // p only affects the field of the coordinate realization, not its ranks
            let pt = RepPoint::coordinate(&necklace_to_juggling(&v), 2)?;
            let segs = segments_from_profile(n, &pt.rank_profile())?;
            if let Some(prev) = table.insert(segs, v.clone()) {
                return Err(Error::Inconsistent(format!(
                    "{prev} and {v} have the same segment decomposition"
                )));
            }
        }
        Ok(Self { n, table })
    }

    pub fn classify(&self, pt: &RepPoint) -> Result<Necklace> {
        let segs = segments_from_profile(self.n, &pt.rank_profile())?;
        self.table.get(&segs).cloned().ok_or_else(|| {
            Error::Inconsistent(format!(
                "point with segments {:?} matches no fixed point",
                segs.segments()
            ))
        })
    }
}

/// The necklace of the torus fixed point isomorphic to `pt`.
pub fn iso_class(pt: &RepPoint) -> Result<Necklace> {
    Classifier::new(pt.k, pt.n)?.classify(pt)
}

fn check_kn_p(k: usize, n: usize, p: u32) -> Result<()> {
    crate::error::check_kn(k, n)?;
    check_prime(p)
}

fn dfs(
    k: usize,
    spaces: &mut Vec<PrimeFieldMatrix>,
    visit: &mut dyn FnMut(&[PrimeFieldMatrix]) -> Result<()>,
) -> Result<()> {
    let n = spaces[0].cols;
    let last = spaces.last().expect("V_1 is chosen first").shifted();
    if spaces.len() == n {
        if spaces[0].span_contains(&last) {
            visit(spaces)?;
        }
        return Ok(());
    }
    for next in superspaces(&last, k) {
        spaces.push(next);
        dfs(k, spaces, visit)?;
        spaces.pop();
    }
    Ok(())
}

/// Runs `visit` on every point, in parallel over `V_1`, and merges per-branch results.
fn fold_points<T: Send>(
    k: usize,
    n: usize,
    p: u32,
    init: impl Fn() -> T + Sync,
    step: impl Fn(&mut T, &[PrimeFieldMatrix]) -> Result<()> + Sync,
    merge: impl Fn(T, T) -> T + Sync + Send,
) -> Result<T> {
    check_kn_p(k, n, p)?;
    subspaces(p, n, k)
        .into_par_iter()
        .map(|v1| {
            let mut acc = init();
            let mut spaces = vec![v1];
            dfs(k, &mut spaces, &mut |s| step(&mut acc, s))?;
            Ok(acc)
        })
        .try_reduce(&init, |a, b| Ok(merge(a, b)))
}

/// Number of `F_p`-points of `X(k, n)`.
pub fn count_points(k: usize, n: usize, p: u32) -> Result<u64> {
    fold_points(
        k,
        n,
        p,
        || 0u64,
        |c, _| {
            *c += 1;
            Ok(())
        },
        |a, b| a + b,
    )
}

/// Number of points whose subspaces are all spanned by standard basis vectors.
pub fn count_coordinate_points(k: usize, n: usize) -> Result<u64> {
    Ok(coordinate_patterns(k, n)?.len() as u64)
}

/// The coordinate points as tuples of subsets `S_a` with `V_a = span{v_j : j ∈ S_a}`.
pub fn coordinate_patterns(k: usize, n: usize) -> Result<Vec<Vec<KSubset>>> {
    crate::error::check_kn(k, n)?;
    let all = crate::necklace::k_subsets(n, k);
    // s(S) ⊆ T as coordinate spans
    let fits = |s: &KSubset, t: &KSubset| s.elems().iter().all(|&j| j == n || t.contains(j + 1));
    let mut out = Vec::new();
    let mut stack: Vec<KSubset> = Vec::new();
    fn rec(
        all: &[KSubset],
        n: usize,
        fits: &dyn Fn(&KSubset, &KSubset) -> bool,
        stack: &mut Vec<KSubset>,
        out: &mut Vec<Vec<KSubset>>,
    ) {
        if stack.len() == n {
            if fits(&stack[n - 1], &stack[0]) {
                out.push(stack.clone());
            }
            return;
        }
        for s in all {
            if stack.last().is_none_or(|prev| fits(prev, s)) {
                stack.push(s.clone());
                rec(all, n, fits, stack, out);
                stack.pop();
            }
        }
    }
    rec(&all, n, &fits, &mut stack, &mut out);
    Ok(out)
}

/// Points per isomorphism class.
pub fn class_sizes(k: usize, n: usize, p: u32) -> Result<BTreeMap<Necklace, u64>> {
    check_kn_p(k, n, p)?;
    let classifier = Classifier::new(k, n)?;
    let mut sizes = fold_points(
        k,
        n,
        p,
        BTreeMap::<Necklace, u64>::new,
        |acc, spaces| {
            let pt = RepPoint {
                n,
                k,
                p,
                spaces: spaces.to_vec(),
            };
            *acc.entry(classifier.classify(&pt)?).or_default() += 1;
            Ok(())
        },
        |mut a, b| {
            for (v, c) in b {
                *a.entry(v).or_default() += c;
            }
            a
        },
    )?;
    for v in enumerate_necklaces(k, n)? {
        sizes.entry(v).or_default();
    }
    Ok(sizes)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub necklace: Necklace,
    pub size: u64,
    pub expected: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellularityReport {
    pub k: usize,
    pub n: usize,
    pub p: u32,
    pub points: u64,
    pub expected_points: u64,
    pub coordinate_points: u64,
    pub vertices: u64,
    pub classes: Vec<ClassReport>,
    pub mismatches: Vec<String>,
    pub passed: bool,
}

impl CellularityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Compares point counts with cell dimensions taken from the moment graph.
pub fn verify_cellularity(k: usize, n: usize, p: u32) -> Result<CellularityReport> {
    check_kn_p(k, n, p)?;
    let g = crate::momentgraph::build(k, n)?;
    let dims = crate::momentgraph::cell_dims(&g)?;
    let table: BTreeMap<Necklace, usize> = g.vertices().iter().cloned().zip(dims).collect();
    verify_cellularity_against(k, n, p, &table)
}

/// Same as [`verify_cellularity`] with an explicit table of cell dimensions.
pub fn verify_cellularity_against(
    k: usize,
    n: usize,
    p: u32,
    dims: &BTreeMap<Necklace, usize>,
) -> Result<CellularityReport> {
    check_kn_p(k, n, p)?;
    let sizes = class_sizes(k, n, p)?;
    let points: u64 = sizes.values().sum();
    let mut mismatches = Vec::new();
    let direct = count_points(k, n, p)?;
    if direct != points {
        mismatches.push(format!(
            "class sizes sum to {points} but {direct} points were counted"
        ));
    }
    let mut classes = Vec::new();
    let mut expected_points = 0u64;
    for (v, &size) in &sizes {
        let Some(&d) = dims.get(v) else {
            mismatches.push(format!("no cell dimension for {v}"));
            continue;
        };
        let expected = (p as u64).pow(d as u32);
        expected_points += expected;
        if size != expected {
            mismatches.push(format!(
                "class {v}: {size} points, expected {p}^{d} = {expected}"
            ));
        }
        classes.push(ClassReport {
            necklace: v.clone(),
            size,
            expected,
        });
    }
    if expected_points != points {
        mismatches.push(format!(
            "{points} points, but the Poincaré polynomial at {p} is {expected_points}"
        ));
    }
    let coordinate_points = count_coordinate_points(k, n)?;
    let vertices = sizes.len() as u64;
    if coordinate_points != vertices {
        mismatches.push(format!(
            "{coordinate_points} coordinate points but {vertices} necklaces"
        ));
    }
    Ok(CellularityReport {
        k,
        n,
        p,
        points,
        expected_points,
        coordinate_points,
        vertices,
        classes,
        passed: mismatches.is_empty(),
        mismatches,
    })
}

/// Coordinate points and juggling patterns are the same tuples of subsets.
pub fn coordinate_point_necklaces(k: usize, n: usize) -> Result<Vec<Necklace>> {
    let mut out = coordinate_patterns(k, n)?
        .into_iter()
        .map(|entries| juggling_to_necklace(&JugglingPattern::new(n, k, entries)?))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}
