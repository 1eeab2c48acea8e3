//! Tree reconstruction from partial distances: close under rule (R), then
//! Neighbor-Joining on the completed metric, then check every input
//! distance against the result.

use thiserror::Error;

use crate::cords::{Cord, PartialDistance};
use crate::lasso::{closure, ClosureError, ClosureTrace};
use crate::numeric::{Distance, Tolerance};
use crate::tree::{TreeBuilder, TreeError, XTree};

/// Absolute tolerance when comparing the rebuilt tree with the input.
pub const VERIFY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconstructError {
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error("distance matrix is missing cord {0}")]
    NotTotal(Cord),
    #[error("need at least two taxa")]
    TooFewTaxa,
    #[error("input is not additive: branch length {length} joining {what}")]
    NonAdditive { what: String, length: f64 },
    #[error("rebuilt tree gives {actual} for cord {cord}, input says {expected}")]
    Verification {
        cord: Cord,
        expected: f64,
        actual: f64,
    },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

impl ReconstructError {
    /// True for failures that mean the input is not a tree metric, as
    /// opposed to malformed or insufficient input.
    pub fn is_inconsistency(&self) -> bool {
        matches!(
            self,
            ReconstructError::Closure(ClosureError::Inconsistent { .. })
                | ReconstructError::NonAdditive { .. }
                | ReconstructError::Verification { .. }
        )
    }
}

/// Classical Neighbor-Joining on a total distance map. Of several pairs
/// with minimal Q-criterion (within tolerance) the first in scan order is
/// joined. Branch lengths in `[-ε, 0)` are set to 0; anything more negative
/// is rejected.
pub fn neighbor_joining(d: &PartialDistance<f64>, tol: &Tolerance) -> Result<XTree, ReconstructError> {
    if let Some(cord) = d.missing().into_iter().next() {
        return Err(ReconstructError::NotTotal(cord));
    }
    let taxa: Vec<_> = d.taxa().iter().cloned().collect();
    let n = taxa.len();
    if n < 2 {
        return Err(ReconstructError::TooFewTaxa);
    }
    let scale = d.iter().map(|(_, &v)| v).fold(0.0, f64::max);
    let slack = tol.slack(scale);

    // Node k < n is taxon k; joins create nodes n, n+1, ...
    let total_nodes = 2 * n;
    let mut dist = vec![0.0; total_nodes * total_nodes];
    for (cord, &v) in d.iter() {
        let i = taxa.binary_search(cord.first()).unwrap();
        let j = taxa.binary_search(cord.second()).unwrap();
        dist[i * total_nodes + j] = v;
        dist[j * total_nodes + i] = v;
    }
    let at = |dist: &[f64], i: usize, j: usize| dist[i * total_nodes + j];
    let name = |k: usize| {
        if k < n {
            taxa[k].to_string()
        } else {
            format!("internal node {}", k - n + 1)
        }
    };
    let check = |length: f64, what: String| -> Result<f64, ReconstructError> {
        if length < -slack {
            Err(ReconstructError::NonAdditive { what, length })
        } else {
            Ok(length.max(0.0))
        }
    };

    let mut builder = TreeBuilder::new();
    let mut vertex: Vec<usize> = taxa
        .iter()
        .map(|t| builder.add_vertex(Some(t.clone())))
        .collect();
    if n == 2 {
        builder.add_edge(vertex[0], vertex[1], check(at(&dist, 0, 1), name(0))?);
        return Ok(builder.build()?);
    }

    let mut active: Vec<usize> = (0..n).collect();
    let mut next = n;
    while active.len() > 3 {
        let r = active.len();
        let sums: Vec<f64> = active
            .iter()
            .map(|&i| active.iter().map(|&k| at(&dist, i, k)).sum())
            .collect();
        let q = |a: usize, b: usize| {
            (r as f64 - 2.0) * at(&dist, active[a], active[b]) - sums[a] - sums[b]
        };
        let mut min = f64::INFINITY;
        for a in 0..r {
            for b in a + 1..r {
                min = min.min(q(a, b));
            }
        }
        let q_slack = tol.slack(min);
        let (a, b) = (0..r)
            .flat_map(|a| (a + 1..r).map(move |b| (a, b)))
            .find(|&(a, b)| q(a, b) <= min + q_slack)
            .expect("at least one pair");
        let (i, j) = (active[a], active[b]);
        let dij = at(&dist, i, j);
        let li = dij / 2.0 + (sums[a] - sums[b]) / (2.0 * (r as f64 - 2.0));
        let lj = dij - li;
        let li = check(li, format!("{} to its parent", name(i)))?;
        let lj = check(lj, format!("{} to its parent", name(j)))?;

        let u = next;
        next += 1;
        vertex.push(builder.add_vertex(None));
        builder.add_edge(vertex[u], vertex[i], li);
        builder.add_edge(vertex[u], vertex[j], lj);
        for &k in &active {
            if k != i && k != j {
                let v = (at(&dist, i, k) + at(&dist, j, k) - dij) / 2.0;
                dist[u * total_nodes + k] = v;
                dist[k * total_nodes + u] = v;
            }
        }
        active.retain(|&k| k != i && k != j);
        active.push(u);
    }

    let [i, j, k] = [active[0], active[1], active[2]];
    let (dij, dik, djk) = (at(&dist, i, j), at(&dist, i, k), at(&dist, j, k));
    let center = builder.add_vertex(None);
    for (x, length) in [
        (i, (dij + dik - djk) / 2.0),
        (j, (dij + djk - dik) / 2.0),
        (k, (dik + djk - dij) / 2.0),
    ] {
        let length = check(length, format!("{} to the final center", name(x)))?;
        builder.add_edge(center, vertex[x], length);
    }
    Ok(builder.build()?)
}

#[derive(Clone, Debug)]
pub enum Reconstruction<V = f64> {
    Complete { tree: XTree, closure: ClosureTrace<V> },
    /// Closure stopped short; `missing` lists the cords it could not reach.
    Incomplete { missing: Vec<Cord>, closure: ClosureTrace<V> },
}

impl<V> Reconstruction<V> {
    pub fn tree(&self) -> Option<&XTree> {
        match self {
            Reconstruction::Complete { tree, .. } => Some(tree),
            Reconstruction::Incomplete { .. } => None,
        }
    }

    pub fn closure(&self) -> &ClosureTrace<V> {
        match self {
            Reconstruction::Complete { closure, .. } | Reconstruction::Incomplete { closure, .. } => closure,
        }
    }
}

/// Closure, Neighbor-Joining, and verification of every input distance to
/// within [`VERIFY_TOLERANCE`].
pub fn reconstruct<V: Distance>(
    d: &PartialDistance<V>,
    tol: &Tolerance,
) -> Result<Reconstruction<V>, ReconstructError> {
    let trace = closure(d, tol)?;
    if !trace.is_complete() {
        return Ok(Reconstruction::Incomplete {
            missing: trace.missing(),
            closure: trace,
        });
    }
    let tree = neighbor_joining(&trace.result.to_f64(), tol)?;
    let dist = tree.distance_matrix();
    let n = tree.n_taxa();
    for (cord, v) in d.iter() {
        let i = tree.index_of(cord.first().as_str())?;
        let j = tree.index_of(cord.second().as_str())?;
        let (expected, actual) = (v.to_f64(), dist[i * n + j]);
        if (expected - actual).abs() > VERIFY_TOLERANCE {
            return Err(ReconstructError::Verification {
                cord: cord.clone(),
                expected,
                actual,
            });
        }
    }
    Ok(Reconstruction::Complete { tree, closure: trace })
}
