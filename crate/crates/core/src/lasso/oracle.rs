//! A brute-force test of the topological-lasso property at one weighting.
//!
//! `L` is refuted when some X-tree `T'` not equivalent to `T` has a proper
//! weighting agreeing with `d_(T,w)` on every cord of `L`. Every such `T'`
//! is a contraction of a fully-resolved tree `R` carrying a weighting
//! `w' ≥ 0` (zero exactly on the contracted interior edges), so the search
//! runs over fully-resolved `R`:
//!
//! * `R` not equivalent to `T`: any `w' ≥ 0` fitting `d` refutes, since
//!   contracting never adds splits.
//! * `R` equivalent to `T`: a fitting `w'` must vanish on some interior
//!   edge; each edge is tried with its weight forced to zero.
//!
//! Trees are enumerated by inserting taxa one at a time into every edge.
//! A partial tree on the first `k` taxa is pruned when the cords among
//! those taxa already admit no fit, since restricting a fitting tree keeps
//! it fitting. Feasibility is decided exactly with rational arithmetic.
//! Passing means only that this one weighting admits no refutation.

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use super::simplex::feasible_point;
use super::twodtree::path_in_edge_list;
use crate::cords::CordSet;
use crate::tree::{TreeBuilder, TreeError, XTree};

/// Largest taxon count the oracle accepts.
pub const ORACLE_MAX_TAXA: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{0} taxa exceed the oracle limit of {ORACLE_MAX_TAXA}")]
    TooManyTaxa(usize),
    #[error("interior edges must have positive weight")]
    ImproperWeights,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Clone, Debug)]
pub enum TopologicalVerdict {
    /// A tree not equivalent to the input that fits every distance on `L`,
    /// with zero-weight interior edges contracted.
    Refuted { tree: XTree },
    /// No refutation exists at the given weighting.
    GenericallyTopological,
}

impl TopologicalVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, TopologicalVerdict::Refuted { .. })
    }
}

struct Search<'a> {
    tree: &'a XTree,
    n: usize,
    /// `(i, j, d(i,j))` with `i < j`, sorted by `j`.
    cords: Vec<(usize, usize, BigRational)>,
}

pub fn topological_lasso_oracle(
    tree: &XTree,
    cords: &CordSet,
) -> Result<TopologicalVerdict, OracleError> {
    tree.require_fully_resolved()?;
    let n = tree.n_taxa();
    if n > ORACLE_MAX_TAXA {
        return Err(OracleError::TooManyTaxa(n));
    }
    if !tree.is_properly_weighted() {
        return Err(OracleError::ImproperWeights);
    }
    let weights: Vec<BigRational> = tree
        .edges()
        .iter()
        .map(|e| BigRational::from_float(e.weight()).expect("finite weight"))
        .collect();
    let mut list: Vec<(usize, usize, BigRational)> = cords
        .index_pairs(tree)?
        .into_iter()
        .map(|(i, j)| {
            let d = tree
                .path_edges(i, j)
                .into_iter()
                .fold(BigRational::zero(), |acc, e| acc + &weights[e]);
            (i.min(j), i.max(j), d)
        })
        .collect();
    list.sort_by_key(|&(i, j, _)| (j, i));
    let search = Search { tree, n, cords: list };

    // Vertices 0..n are the leaves of taxa 0..n; interior vertices follow.
    let center = n;
    let edges = vec![(center, 0), (center, 1), (center, 2)];
    Ok(match search.extend(edges, 3, center + 1) {
        Some(tree) => TopologicalVerdict::Refuted { tree },
        None => TopologicalVerdict::GenericallyTopological,
    })
}

impl Search<'_> {
    /// Explores every tree obtained by inserting taxa `k..n` into `edges`.
    fn extend(&self, edges: Vec<(usize, usize)>, k: usize, next: usize) -> Option<XTree> {
        if k == self.n {
            return self.finish(&edges, next);
        }
        if k > 3 && self.fit(&edges, k, None).is_none() {
            return None;
        }
        for slot in 0..edges.len() {
            let mut grown = edges.clone();
            let (u, v) = grown[slot];
            grown[slot] = (u, next);
            grown.push((next, v));
            grown.push((next, k));
            if let Some(t) = self.extend(grown, k + 1, next + 1) {
                return Some(t);
            }
        }
        None
    }

    /// A non-negative weighting of `edges` matching every cord among the
    /// first `k` taxa, with edge `zero` (if any) pinned to weight 0.
    fn fit(&self, edges: &[(usize, usize)], k: usize, zero: Option<usize>) -> Option<Vec<BigRational>> {
        let rows: Vec<&(usize, usize, BigRational)> =
            self.cords.iter().take_while(|&&(_, j, _)| j < k).collect();
        let cols: Vec<usize> = (0..edges.len()).filter(|&e| Some(e) != zero).collect();
        let mut a = Vec::with_capacity(rows.len());
        let mut b = Vec::with_capacity(rows.len());
        for &(i, j, d) in &rows {
            let mut row = vec![0i64; edges.len()];
            for e in path_in_edge_list(edges, *i, *j) {
                row[e] = 1;
            }
            a.push(cols.iter().map(|&c| row[c]).collect::<Vec<_>>());
            b.push(d.clone());
        }
        let x = feasible_point(&a, &b, cols.len())?;
        let mut full = vec![BigRational::zero(); edges.len()];
        for (&c, v) in cols.iter().zip(x) {
            full[c] = v;
        }
        Some(full)
    }

    fn build(&self, edges: &[(usize, usize)], next: usize, weights: Option<&[BigRational]>) -> XTree {
        let mut builder = TreeBuilder::new();
        for t in self.tree.taxa() {
            builder.add_vertex(Some(t.clone()));
        }
        for _ in self.n..next {
            builder.add_vertex(None);
        }
        for (e, &(u, v)) in edges.iter().enumerate() {
            let w = weights.map_or(1.0, |w| num_traits::ToPrimitive::to_f64(&w[e]).unwrap_or(f64::NAN));
            builder.add_edge(u, v, w);
        }
        match weights {
            Some(_) => builder.build_contracting_zero_interior(),
            None => builder.build(),
        }
        .expect("enumerated trees are valid")
    }

    fn finish(&self, edges: &[(usize, usize)], next: usize) -> Option<XTree> {
        let candidate = self.build(edges, next, None);
        if !candidate.is_equivalent(self.tree).expect("same taxa") {
            let w = self.fit(edges, self.n, None)?;
            return Some(self.build(edges, next, Some(&w)));
        }
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u < self.n || v < self.n {
                continue;
            }
            if let Some(w) = self.fit(edges, self.n, Some(e)) {
                return Some(self.build(edges, next, Some(&w)));
            }
        }
        None
    }
}
