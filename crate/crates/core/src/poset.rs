//! Finite posets on `0..size` stored as dense relation matrices.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    leq: Vec<Vec<bool>>,
}

impl Poset {
    /// Builds the relation `i <= j` from a predicate.
    pub fn from_fn(size: usize, mut leq: impl FnMut(usize, usize) -> bool) -> Self {
        let leq = (0..size)
            .map(|i| (0..size).map(|j| leq(i, j)).collect())
            .collect();
        Self { leq }
    }

    /// Reflexive-transitive closure of directed edges `(hi, lo)`, read as `lo <= hi`.
    pub fn closure_of(size: usize, edges: &[(usize, usize)]) -> Self {
        let mut leq = vec![vec![false; size]; size];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(hi, lo) in edges {
            leq[lo][hi] = true;
        }
        // Warshall
        for m in 0..size {
            for i in 0..size {
                if leq[i][m] {
                    let (row_m, row_i) = if i < m {
                        let (a, b) = leq.split_at_mut(m);
                        (&b[0], &mut a[i])
                    } else if i > m {
                        let (a, b) = leq.split_at_mut(i);
                        (&a[m], &mut b[0])
                    } else {
                        continue;
                    };
                    for j in 0..size {
                        if row_m[j] {
                            row_i[j] = true;
                        }
                    }
                }
            }
        }
        Self { leq }
    }

    pub fn size(&self) -> usize {
        self.leq.len()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq[i][j]
    }

    /// Checks reflexivity, antisymmetry and transitivity.
    pub fn is_partial_order(&self) -> bool {
        let n = self.size();
        for i in 0..n {
            if !self.leq[i][i] {
                return false;
            }
            for j in 0..n {
                if i != j && self.leq[i][j] && self.leq[j][i] {
                    return false;
                }
                if self.leq[i][j] {
                    for k in 0..n {
                        if self.leq[j][k] && !self.leq[i][k] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Cover relations `(hi, lo)` with `lo ⋖ hi`, sorted.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        let mut out = Vec::new();
        for hi in 0..n {
            for lo in 0..n {
                if self.lt(lo, hi) && !(0..n).any(|m| self.lt(lo, m) && self.lt(m, hi)) {
                    out.push((hi, lo));
                }
            }
        }
        out
    }

    /// Elements with nothing above them.
    pub fn maximal(&self) -> Vec<usize> {
        let n = self.size();
        (0..n).filter(|&i| !(0..n).any(|j| self.lt(i, j))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_chain() {
        let p = Poset::closure_of(4, &[(3, 2), (2, 1), (1, 0)]);
        assert!(p.is_partial_order());
        assert!(p.leq(0, 3));
        assert!(!p.leq(3, 0));
        assert_eq!(p.covers(), vec![(1, 0), (2, 1), (3, 2)]);
        assert_eq!(p.maximal(), vec![3]);
    }

    #[test]
    fn divisibility_poset() {
        let vals = [1usize, 2, 3, 4, 6, 12];
        let p = Poset::from_fn(6, |i, j| vals[j].is_multiple_of(vals[i]));
        assert!(p.is_partial_order());
        assert_eq!(p.covers().len(), 7);
        let cyc = Poset::closure_of(2, &[(0, 1), (1, 0)]);
        assert!(!cyc.is_partial_order());
    }
}
