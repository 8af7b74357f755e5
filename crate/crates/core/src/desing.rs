//! Dimension vectors on the extended cycle and the tower of Grassmannian
//! fibrations desingularizing an irreducible component `X_J(k, n)`.
//!
//! Vertices of the extended cycle are pairs `(i, r)` with `i ∈ Z_n` and
//! `r ∈ [n]`. The component `X_J` is resolved by choosing, for `r = n, ..., 1`,
//! subspaces `N^{(i,r)}` of dimension `d_J^{(i,r)}`; each choice is a Grassmannian
//! fibration over the previous layer.

use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::necklace::{residue, KSubset};

/// The grid `d_J^{(i,r)} = #(J ∩ {i, i+1, ..., i+n-r})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtDimVector {
    n: usize,
    #[serde(rename = "J")]
    j: KSubset,
    /// `d[i - 1][r - 1]`
    d: Vec<Vec<usize>>,
}

impl ExtDimVector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subset(&self) -> &KSubset {
        &self.j
    }

    /// `d^{(i,r)}` with `i` taken mod `n`; `r = n + 1` gives 0.
    pub fn get(&self, i: i64, r: usize) -> usize {
        if r == self.n + 1 {
            return 0;
        }
        assert!(
            (1..=self.n).contains(&r),
            "r = {r} outside 1..={}",
            self.n + 1
        );
        self.d[residue(i, self.n) - 1][r - 1]
    }

    pub fn grid(&self) -> &[Vec<usize>] {
        &self.d
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid serializes")
    }
}

pub fn d_vector(j: &KSubset) -> Result<ExtDimVector> {
    let n = j.n();
    if j.k() == 0 {
        return invalid("J must be nonempty");
    }
    let d = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|r| {
                    // arc {i, ..., i + n - r} of length n - r + 1
                    (0..=n - r)
                        .filter(|&t| j.contains(residue((i + t) as i64, n)))
                        .count()
                })
                .collect()
        })
        .collect();
    Ok(ExtDimVector { n, j: j.clone(), d })
}

/// One fibration step: `Gr(sub_dim, ambient_dim)` at vertex `(i, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FiberSpec {
    pub i: usize,
    pub r: usize,
    pub sub_dim: usize,
    pub ambient_dim: usize,
}

impl FiberSpec {
    pub fn dim(&self) -> usize {
        self.sub_dim * (self.ambient_dim - self.sub_dim)
    }
}

impl fmt::Display for FiberSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.sub_dim, self.ambient_dim) {
            _ if self.dim() == 0 => f.write_str("pt"),
            (1, a) => write!(f, "P^{}", a - 1),
            (s, a) if s + 1 == a => write!(f, "P^{s}"),
            (s, a) => write!(f, "Gr({s},{a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Layer {
    pub r: usize,
    pub fibers: Vec<FiberSpec>,
}

impl Layer {
    pub fn dim(&self) -> usize {
        self.fibers.iter().map(FiberSpec::dim).sum()
    }
}

/// Layers ordered `r = n` down to `r = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerSpec {
    pub n: usize,
    pub layers: Vec<Layer>,
}

impl TowerSpec {
    pub fn dim(&self) -> usize {
        self.layers.iter().map(Layer::dim).sum()
    }

    pub fn fibers(&self) -> impl Iterator<Item = &FiberSpec> {
        self.layers.iter().flat_map(|l| l.fibers.iter())
    }
}

impl fmt::Display for TowerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r  |")?;
        for i in 1..=self.n {
            write!(f, " {:>8}", format!("i={i}"))?;
        }
        writeln!(f, " | dim")?;
        for l in &self.layers {
            write!(f, "{:<2} |", l.r)?;
            for fib in &l.fibers {
                write!(f, " {:>8}", fib.to_string())?;
            }
            writeln!(f, " | {}", l.dim())?;
        }
        write!(f, "total dimension {}", self.dim())
    }
}

/// The fiber at `(i, r)` is the Grassmannian of `(d^{(i,r)} - d^{(i,r+1)})`-planes in
/// `α^{-1}(N^{(i+1,r+1)}) / β(N^{(i,r+1)})`, where `α` has a one-dimensional kernel;
/// on the top layer the ambient space is the line at `(i, n)`.
pub fn tower(j: &KSubset) -> Result<TowerSpec> {
    let d = d_vector(j)?;
    let n = d.n;
    let layers = (1..=n)
        .rev()
        .map(|r| {
            let fibers = (1..=n)
                .map(|i| {
                    let ii = i as i64;
                    let below = d.get(ii, r + 1);
                    let ambient = if r == n {
                        1
                    } else {
                        d.get(ii + 1, r + 1) + 1 - below
                    };
                    FiberSpec {
                        i,
                        r,
                        sub_dim: d.get(ii, r) - below,
                        ambient_dim: ambient,
                    }
                })
                .collect();
            Layer { r, fibers }
        })
        .collect();
    Ok(TowerSpec { n, layers })
}

/// Total dimension of the tower; equals `k(n - k)` for every `J`.
pub fn desing_dim(j: &KSubset) -> Result<usize> {
    Ok(tower(j)?.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::necklace::k_subsets;

    fn subset(n: usize, v: &[usize]) -> KSubset {
        KSubset::new(n, v.to_vec()).unwrap()
    }

    /// Positions of the published `n = 4` figures, row by row, as `(i, r)`.
    /// The middle row has an empty slot between the second and third entries.
    const LAYOUT: [&[(i64, usize)]; 5] = [
        &[(3, 4), (3, 3), (4, 4)],
        &[(2, 2), (2, 1), (3, 2)],
        &[(2, 3), (1, 1), (3, 1), (4, 3)],
        &[(1, 2), (4, 1), (4, 2)],
        &[(2, 4), (1, 3), (1, 4)],
    ];

    fn read_layout(d: &ExtDimVector) -> Vec<Vec<usize>> {
        LAYOUT
            .iter()
            .map(|row| row.iter().map(|&(i, r)| d.get(i, r)).collect())
            .collect()
    }

    #[test]
    fn figure_grids() {
        let d12 = d_vector(&subset(4, &[1, 2])).unwrap();
        assert_eq!(
            read_layout(&d12),
            vec![
                vec![0, 0, 0],
                vec![1, 2, 1],
                vec![1, 2, 2, 1],
                vec![2, 2, 2],
                vec![1, 2, 1]
            ]
        );
        let d13 = d_vector(&subset(4, &[1, 3])).unwrap();
        assert_eq!(
            read_layout(&d13),
            vec![
                vec![1, 1, 0],
                vec![1, 2, 2],
                vec![1, 2, 2, 1],
                vec![2, 2, 1],
                vec![0, 1, 1]
            ]
        );
    }

    #[test]
    fn spot_values() {
        let d12 = d_vector(&subset(4, &[1, 2])).unwrap();
        assert_eq!(
            (d12.get(2, 1), d12.get(3, 2), d12.get(3, 4), d12.get(3, 3)),
            (2, 1, 0, 0)
        );
        let d13 = d_vector(&subset(4, &[1, 3])).unwrap();
        assert_eq!(
            (d13.get(3, 2), d13.get(4, 2), d13.get(2, 4), d13.get(3, 4)),
            (2, 1, 0, 1)
        );
        assert_eq!(d13.get(3, 5), 0);
        assert_eq!(
            d13.to_json(),
            r#"{"n":4,"J":[1,3],"d":[[2,2,1,1],[2,1,1,0],[2,2,1,1],[2,1,1,0]]}"#
        );
    }

    #[test]
    fn grid_invariants() {
        for n in 2..=7 {
            for k in 1..n {
                for j in k_subsets(n, k) {
                    let d = d_vector(&j).unwrap();
                    for i in 1..=n as i64 {
                        assert_eq!(d.get(i, 1), k);
                        assert!(d.get(i, n) <= 1);
                        for r in 1..n {
                            assert!(d.get(i, r) >= d.get(i, r + 1));
                        }
                    }
                }
            }
        }
    }

    fn layer_dims(j: &KSubset) -> Vec<(usize, Vec<String>)> {
        tower(j)
            .unwrap()
            .layers
            .iter()
            .map(|l| {
                (
                    l.r,
                    l.fibers
                        .iter()
                        .filter(|f| f.dim() > 0)
                        .map(|f| f.to_string())
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn towers_of_the_n4_examples() {
        let t = layer_dims(&subset(4, &[1, 2]));
        let p1 = |c: usize| vec!["P^1".to_string(); c];
        assert_eq!(t, vec![(4, vec![]), (3, p1(1)), (2, p1(2)), (1, p1(1))]);
        let t = layer_dims(&subset(4, &[1, 3]));
        assert_eq!(t, vec![(4, vec![]), (3, p1(2)), (2, vec![]), (1, p1(2))]);
        assert_eq!(desing_dim(&subset(4, &[1, 2])).unwrap(), 4);
        assert_eq!(desing_dim(&subset(4, &[1, 3])).unwrap(), 4);
    }

    #[test]
    fn tower_dimension_is_k_times_n_minus_k() {
        for n in 2..=7 {
            for k in 1..n {
                for j in k_subsets(n, k) {
                    let t = tower(&j).unwrap();
                    assert!(t.fibers().all(|f| f.sub_dim <= f.ambient_dim), "{j}");
                    assert_eq!(t.dim(), k * (n - k), "J = {j}, n = {n}");
                }
            }
        }
    }

    #[test]
    fn k1_tower_is_a_bott_tower() {
        for n in 2..=7 {
            let j = subset(n, &[n]);
            let d = d_vector(&j).unwrap();
            for i in 1..=n {
                for r in 1..=n {
                    assert_eq!(d.get(i as i64, r), usize::from(r <= i));
                }
            }
            let t = tower(&j).unwrap();
            assert!(t.fibers().all(|f| f.dim() <= 1));
            assert_eq!(t.fibers().filter(|f| f.dim() == 1).count(), n - 1);
        }
    }

    #[test]
    fn empty_subset_is_rejected() {
        assert!(d_vector(&subset(3, &[])).is_err());
    }
}
