//! Exact rank of the cord/edge path-incidence matrix.
//!
//! Distances on `L` determine the weights uniquely iff the `|L| x |E|` 0/1
//! matrix (row per cord, column per edge, 1 when the edge lies on the
//! cord's path) has rank `|E|`.
//!
//! Rank is computed by fraction-free elimination in `i128` with rows
//! divided by their gcd after every update, which keeps entries small in
//! practice. Any overflow falls back to Bareiss elimination over `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::cords::CordSet;
use crate::tree::{TreeError, XTree};

/// Row per cord (in cord-set order), column per edge id.
pub fn path_incidence_matrix(tree: &XTree, cords: &CordSet) -> Result<Vec<Vec<i64>>, TreeError> {
    let m = tree.edges().len();
    cords
        .index_pairs(tree)?
        .into_iter()
        .map(|(i, j)| {
            let mut row = vec![0i64; m];
            for e in tree.path_edges(i, j) {
                row[e] = 1;
            }
            Ok(row)
        })
        .collect()
}

/// Rank via `i128` elimination, or `None` on overflow.
pub fn rank_i128(matrix: &[Vec<i64>]) -> Option<usize> {
    let mut rows: Vec<Vec<i128>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        let pivot = pivot_row[c];
        for row in rows.iter_mut().skip(rank + 1) {
            let a = row[c];
            if a == 0 {
                continue;
            }
            let mut g = 0i128;
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = x.checked_mul(pivot)?.checked_sub(a.checked_mul(y)?)?;
                g = g.gcd(x);
            }
            if g > 1 {
                for x in row.iter_mut() {
                    *x /= g;
                }
            }
        }
        rank += 1;
    }
    Some(rank)
}

/// Rank via Bareiss elimination over arbitrary-precision integers.
pub fn rank_bigint(matrix: &[Vec<i64>]) -> usize {
    let mut rows: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot = pivot_row[c].clone();
        for row in tail.iter_mut() {
            let a = row[c].clone();
            for k in 0..cols {
                // Exact: every entry is a minor of the original matrix.
                row[k] = (&row[k] * &pivot - &a * &pivot_row[k]) / &prev;
            }
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Exact rank: the `i128` route, falling back to `BigInt`.
pub fn incidence_rank(matrix: &[Vec<i64>]) -> usize {
    rank_i128(matrix).unwrap_or_else(|| rank_bigint(matrix))
}

/// True iff the distances on `L` determine every edge weight of `tree`.
pub fn edge_weight_lasso_certificate(tree: &XTree, cords: &CordSet) -> Result<bool, TreeError> {
    tree.require_fully_resolved()?;
    let matrix = path_incidence_matrix(tree, cords)?;
    Ok(matrix.len() >= tree.edges().len() && incidence_rank(&matrix) == tree.edges().len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;

    #[test]
    fn small_ranks() {
        let m = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 2, 1]];
        assert_eq!(rank_i128(&m), Some(2));
        assert_eq!(rank_bigint(&m), 2);
        let id = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(incidence_rank(&id), 2);
        assert_eq!(incidence_rank(&[]), 0);
        assert_eq!(incidence_rank(&[vec![0, 0]]), 0);
    }

    #[test]
    fn overflow_falls_back() {
        let big = i64::MAX;
        let m = vec![vec![big, 1, 0], vec![1, big, 1], vec![big, big, big]];
        let exact = rank_bigint(&m);
        assert_eq!(exact, 3);
        assert_eq!(incidence_rank(&m), 3);
    }

    #[test]
    fn star_and_quartet() {
        let star = parse_newick("(a,b,c);").unwrap();
        let all = CordSet::complete(star.taxa());
        assert!(edge_weight_lasso_certificate(&star, &all).unwrap());
        let two = CordSet::from_pairs(&[("a", "b"), ("b", "c")]).unwrap();
        assert!(!edge_weight_lasso_certificate(&star, &two).unwrap());

        let quartet = parse_newick("((a,b),(c,d));").unwrap();
        let all = CordSet::complete(quartet.taxa());
        assert!(edge_weight_lasso_certificate(&quartet, &all).unwrap());
        let m = path_incidence_matrix(&quartet, &all).unwrap();
        assert_eq!(incidence_rank(&m), 5);
        // The four crossing cords satisfy ac+bd = ad+bc.
        let cycle = CordSet::from_pairs(&[("a", "c"), ("b", "d"), ("a", "d"), ("b", "c")]).unwrap();
        let m = path_incidence_matrix(&quartet, &cycle).unwrap();
        assert_eq!(incidence_rank(&m), 3);
    }
}
