//! Exact rank computations over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Rank of a matrix given as sparse rows `(column, value)` over `ncols` columns.
///
/// Rows are kept sparse during elimination, which stays cheap for the
/// two-term intertwiner equations produced by segment representations.
pub fn rank_sparse(ncols: usize, rows: Vec<Vec<(usize, BigRational)>>) -> usize {
    // pivot column -> reduced row with leading coefficient 1 at that column
    let mut pivots: Vec<Option<Vec<(usize, BigRational)>>> = vec![None; ncols];
    let mut rank = 0;
    for row in rows {
        let mut row = normalize(row);
        while let Some((lead, coeff)) = row.first().cloned() {
            match &pivots[lead] {
                Some(p) => {
                    row = axpy(&row, p, &coeff);
                }
                None => {
                    let inv = BigRational::one() / coeff;
                    let scaled = row.into_iter().map(|(c, v)| (c, v * &inv)).collect();
                    pivots[lead] = Some(scaled);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn normalize(mut row: Vec<(usize, BigRational)>) -> Vec<(usize, BigRational)> {
    row.sort_by_key(|(c, _)| *c);
    let mut out: Vec<(usize, BigRational)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

/// `row - coeff * pivot`, both sorted by column.
fn axpy(
    row: &[(usize, BigRational)],
    pivot: &[(usize, BigRational)],
    coeff: &BigRational,
) -> Vec<(usize, BigRational)> {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_piv = i >= row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push(row[i].clone());
            i += 1;
        } else if take_piv {
            out.push((pivot[j].0, -(coeff * &pivot[j].1)));
            j += 1;
        } else {
            let v = &row[i].1 - coeff * &pivot[j].1;
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Rank of a dense integer matrix.
pub fn rank_dense(m: &[Vec<i64>]) -> usize {
    let ncols = m.first().map_or(0, |r| r.len());
    let rows = m
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(c, &v)| (c, BigRational::from_integer(v.into())))
                .collect()
        })
        .collect();
    rank_sparse(ncols, rows)
}
