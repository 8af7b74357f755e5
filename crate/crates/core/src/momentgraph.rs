//! The moment graph of `X(k, n)` and everything read off from it: cell dimensions,
//! Poincaré polynomials, cell closures, and DOT/JSON exports.
//!
//! Vertices are the necklaces in canonical order. Each mutation of the fixed point
//! `psi^{-1}(I)` gives an edge `I -> I'` with `I' < I`, labelled by the character
//! `ε_j - ε_{j'} - #[j', j)_a δ`, where the moved run leaves segment `j` at vertex
//! `a` and lands in segment `j'`.

use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affperm::{from_necklace, length};
use crate::error::{check_kn, invalid, Error, Result};
use crate::necklace::{enumerate_necklaces, necklace_leq_unchecked, rotated_pos, Necklace};
use crate::quiver::{mutations, psi, psi_inverse};

/// A character of the `(n+1)`-torus: `Σ eps[i] ε_{i+1} + delta δ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    pub eps: Vec<i64>,
    pub delta: i64,
}

impl Character {
    /// `ε_j - ε_{j'} - m δ`.
    pub fn edge(n: usize, j: usize, jp: usize, m: i64) -> Self {
        let mut eps = vec![0; n];
        eps[j - 1] += 1;
        eps[jp - 1] -= 1;
        Self { eps, delta: -m }
    }

    /// Returns `(j, j', m)` when the character has the edge-label shape.
    pub fn as_edge(&self) -> Option<(usize, usize, i64)> {
        let plus: Vec<usize> = (0..self.eps.len()).filter(|&i| self.eps[i] == 1).collect();
        let minus: Vec<usize> = (0..self.eps.len()).filter(|&i| self.eps[i] == -1).collect();
        let nonzero = self.eps.iter().filter(|&&e| e != 0).count();
        (plus.len() == 1 && minus.len() == 1 && nonzero == 2)
            .then(|| (plus[0] + 1, minus[0] + 1, -self.delta))
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_edge() {
            Some((j, jp, m)) => write!(f, "e{j}-e{jp}-{m}d"),
            None => {
                let mut first = true;
                for (i, &c) in self.eps.iter().enumerate() {
                    if c != 0 {
                        if !first && c > 0 {
                            f.write_char('+')?;
                        }
                        write!(f, "{c}e{}", i + 1)?;
                        first = false;
                    }
                }
                if self.delta != 0 || first {
                    if !first && self.delta >= 0 {
                        f.write_char('+')?;
                    }
                    write!(f, "{}d", self.delta)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: Character,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentGraph {
    k: usize,
    n: usize,
    vertices: Vec<Necklace>,
    edges: Vec<Edge>,
}

impl MomentGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Necklace] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn index_of(&self, v: &Necklace) -> Result<usize> {
        self.vertices.binary_search(v).map_err(|_| {
            Error::InvalidArgument(format!(
                "{v} is not a vertex of the moment graph of X({}, {})",
                self.k, self.n
            ))
        })
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = &Edge> {
        // edges are sorted by (src, dst)
        let start = self.edges.partition_point(|e| e.src < v);
        self.edges[start..].iter().take_while(move |e| e.src == v)
    }

    pub fn outdegree(&self, v: usize) -> usize {
        self.out_edges(v).count()
    }
}

/// Builds the moment graph of `X(k, n)`, checking both label derivations
/// (cyclic interval count and row shift) against each other.
pub fn build(k: usize, n: usize) -> Result<MomentGraph> {
    check_kn(k, n)?;
    let vertices = enumerate_necklaces(k, n)?;
    let per_vertex: Vec<Result<Vec<Edge>>> = vertices
        .par_iter()
        .enumerate()
        .map(|(src, v)| {
            let q = psi_inverse(v);
            let mut out = Vec::new();
            for m in mutations(&q) {
                let target = psi(&m.result);
                let dst = vertices
                    .binary_search(&target)
                    .map_err(|_| Error::Inconsistent(format!("mutation target {target} is not a necklace")))?;
                let (j, jp, a) = (m.source, m.target, m.start_vertex);
                if j == jp {
                    return Err(Error::Inconsistent(format!("degenerate label at edge {v} -> {target}")));
                }
                // #[j', j)_a, counted in the rotated order starting at a
                let interval = rotated_pos(a, j, n) as i64 - rotated_pos(a, jp, n) as i64;
                if interval != m.shift as i64 {
                    return Err(Error::Inconsistent(format!(
                        "edge {v} -> {target}: #[{jp},{j})_{a} = {interval} but the run moved by {}",
                        m.shift
                    )));
                }
                check_necklace_move(v, &target, j, jp)?;
                out.push(Edge {
                    src,
                    dst,
                    label: Character::edge(n, j, jp, interval),
                });
            }
            out.sort_by_key(|e| e.dst);
            Ok(out)
        })
        .collect();
    let mut edges = Vec::new();
    for r in per_vertex {
        edges.extend(r?);
    }
    Ok(MomentGraph {
        k,
        n,
        vertices,
        edges,
    })
}

/// On the changed entries, `I_h = (I'_h \ {j'}) ∪ {j}`, and `I' < I`.
fn check_necklace_move(src: &Necklace, dst: &Necklace, j: usize, jp: usize) -> Result<()> {
    for (h, (a, b)) in src.entries().iter().zip(dst.entries()).enumerate() {
        if a == b {
            continue;
        }
        let only_src: Vec<usize> = a
            .elems()
            .iter()
            .copied()
            .filter(|x| !b.contains(*x))
            .collect();
        let only_dst: Vec<usize> = b
            .elems()
            .iter()
            .copied()
            .filter(|x| !a.contains(*x))
            .collect();
        if only_src != [j] || only_dst != [jp] {
            return Err(Error::Inconsistent(format!(
                "edge {src} -> {dst}: entry {} does not swap {jp} for {j}",
                h + 1
            )));
        }
    }
    if src == dst || !necklace_leq_unchecked(dst, src) {
        return Err(Error::Inconsistent(format!(
            "edge {src} -> {dst} does not go down"
        )));
    }
    Ok(())
}

/// Dimension of the cell `C(N)`: the outdegree of `N`, required to agree with the
/// length of its bounded affine permutation and, for `k = 1`, with `n - n_N`.
pub fn cell_dim(g: &MomentGraph, v: &Necklace) -> Result<usize> {
    let idx = g.index_of(v)?;
    let out = g.outdegree(idx);
    let len = length(&from_necklace(v)?);
    if out != len {
        return Err(Error::Inconsistent(format!(
            "cell {v}: outdegree {out} but permutation length {len}"
        )));
    }
    if g.k == 1 {
        let by_distinct = g.n - v.distinct_entries();
        if by_distinct != out {
            return Err(Error::Inconsistent(format!(
                "cell {v}: outdegree {out} but n - #distinct = {by_distinct}"
            )));
        }
    }
    Ok(out)
}

/// All cell dimensions in vertex order.
pub fn cell_dims(g: &MomentGraph) -> Result<Vec<usize>> {
    g.vertices.par_iter().map(|v| cell_dim(g, v)).collect()
}

/// Coefficients `[c_0, ..., c_{k(n-k)}]` of `P_{k,n}(q)` from a built graph.
pub fn poincare_of(g: &MomentGraph) -> Result<Vec<u64>> {
    let top = g.k * (g.n - g.k);
    let mut coeffs = vec![0u64; top + 1];
    for d in cell_dims(g)? {
        if d > top {
            return Err(Error::Inconsistent(format!(
                "cell dimension {d} exceeds k(n-k) = {top}"
            )));
        }
        coeffs[d] += 1;
    }
    Ok(coeffs)
}

pub fn poincare(k: usize, n: usize) -> Result<Vec<u64>> {
    poincare_of(&build(k, n)?)
}

/// Poincaré polynomial of the totally nonnegative Grassmannian: `q^{k(n-k)} P(1/q)`.
pub fn tnn_poincare(k: usize, n: usize) -> Result<Vec<u64>> {
    Ok(reversed(&poincare(k, n)?))
}

pub fn reversed(p: &[u64]) -> Vec<u64> {
    p.iter().rev().copied().collect()
}

/// Renders coefficients as `1 + 3q + 3q^2`.
pub fn format_poly(coeffs: &[u64]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(d, &c)| match (d, c) {
            (0, c) => c.to_string(),
            (1, 1) => "q".to_string(),
            (1, c) => format!("{c}q"),
            (d, 1) => format!("q^{d}"),
            (d, c) => format!("{c}q^{d}"),
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// `{ N' : N' <= N }` together with the induced subgraph on it.
pub fn cell_closure(g: &MomentGraph, v: &Necklace) -> Result<(Vec<Necklace>, MomentGraph)> {
    g.index_of(v)?;
    let keep: Vec<usize> = (0..g.vertices.len())
        .filter(|&i| necklace_leq_unchecked(&g.vertices[i], v))
        .collect();
    let remap = |i: usize| keep.binary_search(&i).ok();
    let edges = g
        .edges
        .iter()
        .filter_map(|e| {
            Some(Edge {
                src: remap(e.src)?,
                dst: remap(e.dst)?,
                label: e.label.clone(),
            })
        })
        .collect();
    let vertices: Vec<Necklace> = keep.iter().map(|&i| g.vertices[i].clone()).collect();
    let sub = MomentGraph {
        k: g.k,
        n: g.n,
        vertices: vertices.clone(),
        edges,
    };
    Ok((vertices, sub))
}

pub fn export_dot(g: &MomentGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph \"X({},{})\" {{", g.k, g.n);
    for (i, v) in g.vertices.iter().enumerate() {
        let _ = writeln!(s, "  v{i} [label=\"{v}\"];");
    }
    for e in &g.edges {
        let _ = writeln!(s, "  v{} -> v{} [label=\"{}\"];", e.src, e.dst, e.label);
    }
    s.push_str("}\n");
    s
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    src: usize,
    dst: usize,
    eps: Vec<i64>,
    delta: i64,
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    k: usize,
    n: usize,
    vertices: Vec<Necklace>,
    edges: Vec<JsonEdge>,
}

/// JSON export; `delta` is the coefficient of `δ` (negative on every edge).
pub fn export_json(g: &MomentGraph) -> String {
    let raw = JsonGraph {
        k: g.k,
        n: g.n,
        vertices: g.vertices.clone(),
        edges: g
            .edges
            .iter()
            .map(|e| JsonEdge {
                src: e.src,
                dst: e.dst,
                eps: e.label.eps.clone(),
                delta: e.label.delta,
            })
            .collect(),
    };
    serde_json::to_string(&raw).expect("graph serializes")
}

pub fn from_json(s: &str) -> Result<MomentGraph> {
    let raw: JsonGraph = serde_json::from_str(s)
        .map_err(|e| Error::InvalidArgument(format!("bad moment graph JSON: {e}")))?;
    let nv = raw.vertices.len();
    if raw.edges.iter().any(|e| e.src >= nv || e.dst >= nv) {
        return invalid("edge endpoint out of range");
    }
    let mut edges: Vec<Edge> = raw
        .edges
        .into_iter()
        .map(|e| Edge {
            src: e.src,
            dst: e.dst,
            label: Character {
                eps: e.eps,
                delta: e.delta,
            },
        })
        .collect();
    edges.sort_by_key(|e| (e.src, e.dst));
    Ok(MomentGraph {
        k: raw.k,
        n: raw.n,
        vertices: raw.vertices,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nk(s: &str) -> Necklace {
        s.parse().unwrap()
    }

    fn label(g: &MomentGraph, a: &str, b: &str) -> Option<String> {
        let (ia, ib) = (g.index_of(&nk(a)).unwrap(), g.index_of(&nk(b)).unwrap());
        g.out_edges(ia)
            .find(|e| e.dst == ib)
            .map(|e| e.label.to_string())
    }

    #[test]
    fn thirteen_graph_labels() {
        let g = build(1, 3).unwrap();
        assert_eq!(g.edges().len(), 9);
        let expected = [
            ("111", "121", "e1-e2-2d"),
            ("111", "133", "e1-e3-1d"),
            ("222", "223", "e2-e3-2d"),
            ("222", "121", "e2-e1-1d"),
            ("333", "223", "e3-e2-1d"),
            ("333", "133", "e3-e1-2d"),
            ("121", "123", "e1-e3-1d"),
            ("223", "123", "e2-e1-1d"),
            ("133", "123", "e3-e2-1d"),
        ];
        for (a, b, l) in expected {
            assert_eq!(label(&g, a, b).as_deref(), Some(l), "{a} -> {b}");
        }
    }

    #[test]
    fn minimal_vertex_has_no_out_edges() {
        let g = build(1, 2).unwrap();
        assert_eq!(g.outdegree(g.index_of(&nk("12")).unwrap()), 0);
        assert_eq!(g.vertices().len(), 3);
    }

    #[test]
    fn cell_dims_examples() {
        let g = build(1, 3).unwrap();
        assert_eq!(cell_dim(&g, &nk("123")).unwrap(), 0);
        assert_eq!(cell_dim(&g, &nk("111")).unwrap(), 2);
        let g24 = build(2, 4).unwrap();
        assert_eq!(cell_dim(&g24, &nk("13|34|34|14")).unwrap(), 2);
        assert!(cell_dim(&g, &nk("12")).is_err());
    }

    #[test]
    fn edge_characters_have_label_shape() {
        for (k, n) in [(1, 4), (2, 4), (2, 5)] {
            let g = build(k, n).unwrap();
            for e in g.edges() {
                let (j, jp, m) = e.label.as_edge().unwrap();
                assert_ne!(j, jp);
                assert!(1 <= m && m < n as i64);
            }
        }
    }

    #[test]
    fn poincare_examples() {
        assert_eq!(poincare(1, 3).unwrap(), vec![1, 3, 3]);
        assert_eq!(tnn_poincare(1, 3).unwrap(), vec![3, 3, 1]);
        assert_eq!(tnn_poincare(1, 4).unwrap(), vec![4, 6, 4, 1]);
        assert_eq!(format_poly(&[1, 3, 3]), "1 + 3q + 3q^2");
        assert_eq!(format_poly(&[3, 3, 1]), "3 + 3q + q^2");
        let p = poincare(2, 4).unwrap();
        assert_eq!(
            p.iter().sum::<u64>() as usize,
            enumerate_necklaces(2, 4).unwrap().len()
        );
        assert_eq!(*p.last().unwrap(), 6);
    }

    #[test]
    fn closure_examples() {
        let g = build(1, 3).unwrap();
        let (c, sub) = cell_closure(&g, &nk("111")).unwrap();
        let names: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        assert_eq!(names, ["111", "121", "123", "133"]);
        assert_eq!(sub.edges().len(), 4);
        let (c, _) = cell_closure(&g, &nk("123")).unwrap();
        assert_eq!(c, vec![nk("123")]);
    }

    #[test]
    fn dot_golden_12() {
        let g = build(1, 2).unwrap();
        let expected = "digraph \"X(1,2)\" {\n  v0 [label=\"11\"];\n  v1 [label=\"12\"];\n  v2 [label=\"22\"];\n  v0 -> v1 [label=\"e1-e2-1d\"];\n  v2 -> v1 [label=\"e2-e1-1d\"];\n}\n";
        assert_eq!(export_dot(&g), expected);
    }

    #[test]
    fn three_dimension_counts_agree() {
        for n in 2..=5 {
            for k in 1..n {
                let g = build(k, n).unwrap();
                let p = poincare_of(&g).unwrap();
                assert_eq!(p[0], 1, "unique point cell for ({k},{n})");
                let binom = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
                assert_eq!(
                    *p.last().unwrap() as usize,
                    binom,
                    "top cells for ({k},{n})"
                );
                assert_eq!(p.len(), k * (n - k) + 1);
            }
        }
    }

    #[test]
    fn k1_poincare_is_binomial_minus_top() {
        for n in 2..=7usize {
            let mut expected = vec![1u64; 1];
            for _ in 0..n {
                let mut next = vec![0u64; expected.len() + 1];
                for (d, c) in expected.iter().enumerate() {
                    next[d] += c;
                    next[d + 1] += c;
                }
                expected = next;
            }
            expected.pop();
            assert_eq!(poincare(1, n).unwrap(), expected, "n = {n}");
        }
    }

    #[test]
    fn top_closures_cover_everything() {
        for (k, n) in [(1, 4), (2, 4), (2, 5)] {
            let g = build(k, n).unwrap();
            let dims = cell_dims(&g).unwrap();
            let mut seen = vec![false; g.vertices().len()];
            for (i, v) in g.vertices().iter().enumerate() {
                if dims[i] == k * (n - k) {
                    for c in cell_closure(&g, v).unwrap().0 {
                        seen[g.index_of(&c).unwrap()] = true;
                    }
                }
            }
            assert!(seen.iter().all(|&b| b));
        }
    }

    #[test]
    fn hasse_covers_are_edges() {
        for (k, n) in [(1, 4), (2, 4), (2, 5)] {
            let g = build(k, n).unwrap();
            let vs = g.vertices();
            let p = crate::poset::Poset::from_fn(vs.len(), |i, j| {
                necklace_leq_unchecked(&vs[i], &vs[j])
            });
            let dims = cell_dims(&g).unwrap();
            for (hi, lo) in p.covers() {
                assert!(
                    g.out_edges(hi).any(|e| e.dst == lo),
                    "{} -> {}",
                    vs[hi],
                    vs[lo]
                );
                assert_eq!(dims[hi], dims[lo] + 1);
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        for (k, n) in [(1, 2), (1, 3), (2, 4)] {
            let g = build(k, n).unwrap();
            assert_eq!(from_json(&export_json(&g)).unwrap(), g);
        }
        let j = export_json(&build(1, 2).unwrap());
        assert!(j.starts_with(r#"{"k":1,"n":2,"vertices":[{"n":2,"k":1,"entries":[[1],[1]]}"#));
    }
}
