//! 2d-trees: graphs grown from one edge by adding vertices of back-degree
//! exactly two (the two back-neighbours need not be adjacent).
//!
//! Recognition runs the construction backwards, deleting a vertex of
//! degree two until a single edge remains. Deleting *any* degree-two
//! vertex `v` of a 2d-tree leaves a 2d-tree: if `v = x_i` with `i ≥ 3`, it
//! has no later neighbours and dropping it from the ordering works; if
//! `v` is `x_1` (or `x_2`), its neighbours are exactly `x_2` and `x_3`, and
//! `x_2, x_3, x_4, …` is an ordering of the rest. So the greedy
//! elimination never needs to backtrack. [`is_2dtree`] still searches
//! exhaustively (with a memo on remaining-vertex sets) and
//! [`is_2dtree_greedy`] is the fast path; tests check they agree.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::cords::CordSet;
use crate::tree::{Taxon, TreeBuilder, TreeError, XTree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwoDTreeError {
    #[error("ordering is not a permutation of the cord set's taxa")]
    NotAPermutation,
    #[error("first two taxa {0} and {1} are not joined by a cord")]
    FirstPairNotACord(Taxon, Taxon),
    #[error("taxon {taxon} has {back_degree} earlier neighbours, expected 2")]
    BackDegree { taxon: Taxon, back_degree: usize },
    #[error("a 2d-tree needs at least two taxa")]
    TooFewTaxa,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

struct Graph {
    taxa: Vec<Taxon>,
    adj: Vec<FixedBitSet>,
    edges: usize,
}

impl Graph {
    fn new(cords: &CordSet) -> Self {
        let taxa: Vec<Taxon> = cords.taxa().iter().cloned().collect();
        let n = taxa.len();
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for c in cords {
            let i = taxa.binary_search(c.first()).unwrap();
            let j = taxa.binary_search(c.second()).unwrap();
            adj[i].insert(j);
            adj[j].insert(i);
        }
        Graph {
            taxa,
            adj,
            edges: cords.len(),
        }
    }

    fn degree_in(&self, v: usize, alive: &FixedBitSet) -> usize {
        self.adj[v].intersection(alive).count()
    }

    fn plausible(&self) -> bool {
        let n = self.taxa.len();
        n >= 2 && self.edges == 2 * n - 3
    }

    /// Builds the forward ordering from the final edge and the elimination
    /// sequence.
    fn ordering(&self, alive: &FixedBitSet, removed: &[usize]) -> Vec<Taxon> {
        alive
            .ones()
            .chain(removed.iter().rev().copied())
            .map(|i| self.taxa[i].clone())
            .collect()
    }
}

/// A 2d-tree ordering of `(X, L)`, with `X` the cord set's taxa, or `None`.
pub fn is_2dtree(cords: &CordSet) -> Option<Vec<Taxon>> {
    let g = Graph::new(cords);
    if !g.plausible() {
        return None;
    }
    let n = g.taxa.len();
    let mut alive = FixedBitSet::with_capacity(n);
    alive.insert_range(..);
    let mut removed = Vec::with_capacity(n);
    let mut dead_ends = HashSet::new();
    search(&g, &mut alive, &mut removed, &mut dead_ends).then(|| g.ordering(&alive, &removed))
}

fn search(
    g: &Graph,
    alive: &mut FixedBitSet,
    removed: &mut Vec<usize>,
    dead_ends: &mut HashSet<FixedBitSet>,
) -> bool {
    if alive.count_ones(..) == 2 {
        // 2n-3 edges and two removed per step leave exactly one.
        return true;
    }
    if dead_ends.contains(alive) {
        return false;
    }
    let choices: Vec<usize> = alive.ones().filter(|&v| g.degree_in(v, alive) == 2).collect();
    for v in choices.into_iter().rev() {
        alive.set(v, false);
        removed.push(v);
        if search(g, alive, removed, dead_ends) {
            return true;
        }
        removed.pop();
        alive.insert(v);
    }
    dead_ends.insert(alive.clone());
    false
}

/// Greedy elimination, always removing the largest degree-two vertex (so
/// the base edge tends to join the smallest taxa).
pub fn is_2dtree_greedy(cords: &CordSet) -> Option<Vec<Taxon>> {
    let g = Graph::new(cords);
    if !g.plausible() {
        return None;
    }
    let n = g.taxa.len();
    let mut alive = FixedBitSet::with_capacity(n);
    alive.insert_range(..);
    let mut removed = Vec::with_capacity(n);
    while alive.count_ones(..) > 2 {
        let v = alive.ones().filter(|&v| g.degree_in(v, &alive) == 2).max()?;
        alive.set(v, false);
        removed.push(v);
    }
    Some(g.ordering(&alive, &removed))
}

/// Checks that `order` is a 2d-tree ordering of `(X, L)`. Returns the
/// back-neighbour pair of every vertex after the first two, earlier one
/// first, as positions in `order`.
pub fn validate_2dtree_ordering(
    cords: &CordSet,
    order: &[Taxon],
) -> Result<Vec<(usize, usize)>, TwoDTreeError> {
    let g = Graph::new(cords);
    let n = g.taxa.len();
    if n < 2 {
        return Err(TwoDTreeError::TooFewTaxa);
    }
    let mut pos = vec![usize::MAX; n];
    if order.len() != n {
        return Err(TwoDTreeError::NotAPermutation);
    }
    for (k, t) in order.iter().enumerate() {
        let i = g.taxa.binary_search(t).map_err(|_| TwoDTreeError::NotAPermutation)?;
        if pos[i] != usize::MAX {
            return Err(TwoDTreeError::NotAPermutation);
        }
        pos[i] = k;
    }
    let at = |k: usize| g.taxa.binary_search(&order[k]).unwrap();
    if !g.adj[at(0)].contains(at(1)) {
        return Err(TwoDTreeError::FirstPairNotACord(order[0].clone(), order[1].clone()));
    }
    let mut backs = Vec::with_capacity(n - 2);
    for (k, taxon) in order.iter().enumerate().skip(2) {
        let mut back: Vec<usize> = g.adj[at(k)].ones().map(|j| pos[j]).filter(|&p| p < k).collect();
        if back.len() != 2 {
            return Err(TwoDTreeError::BackDegree {
                taxon: taxon.clone(),
                back_degree: back.len(),
            });
        }
        back.sort_unstable();
        backs.push((back[0], back[1]));
    }
    Ok(backs)
}

/// The tree of the constructive argument: start from the edge `x_1 x_2`;
/// for each later `x_i` with back-neighbours `x_j` (earlier) and `x_k`,
/// subdivide an edge of the path between leaves `x_j` and `x_k` and hang
/// `x_i` from the new vertex. The subdivided edge is the one whose midpoint
/// is nearest the path's midpoint, ties going to the `x_j` side. All edges
/// get weight 1.
pub fn tree_from_2dtree(cords: &CordSet, order: &[Taxon]) -> Result<XTree, TwoDTreeError> {
    let backs = validate_2dtree_ordering(cords, order)?;
    // Vertex k < n is the leaf of order[k]; interior vertices follow.
    let n = order.len();
    let mut edges: Vec<(usize, usize)> = vec![(0, 1)];
    let mut next = n;
    for (k, &(j, l)) in backs.iter().enumerate() {
        let path = path_in_edge_list(&edges, j, l);
        let m = path.len();
        let pick = if m % 2 == 1 { (m - 1) / 2 } else { m / 2 - 1 };
        let (u, v) = edges[path[pick]];
        let mid = next;
        next += 1;
        edges[path[pick]] = (u, mid);
        edges.push((mid, v));
        edges.push((mid, k + 2));
    }

    let mut builder = TreeBuilder::new();
    for taxon in order {
        builder.add_vertex(Some(taxon.clone()));
    }
    for _ in n..next {
        builder.add_vertex(None);
    }
    for (u, v) in edges {
        builder.add_edge(u, v, 1.0);
    }
    Ok(builder.build()?)
}

/// Edge indices on the path from `from` to `to`, in order from `from`.
pub(super) fn path_in_edge_list(edges: &[(usize, usize)], from: usize, to: usize) -> Vec<usize> {
    let nv = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0) + 1;
    let mut adj = vec![Vec::new(); nv];
    for (e, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    let mut via = vec![usize::MAX; nv];
    let mut seen = vec![false; nv];
    seen[to] = true;
    let mut stack = vec![to];
    while let Some(x) = stack.pop() {
        for &(y, e) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                via[y] = e;
                stack.push(y);
            }
        }
    }
    let mut path = Vec::new();
    let mut x = from;
    while x != to {
        let e = via[x];
        path.push(e);
        let (u, v) = edges[e];
        x = if u == x { v } else { u };
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::{parse_newick, write_newick};

    fn taxa(labels: &[&str]) -> Vec<Taxon> {
        labels.iter().map(|s| Taxon::new(*s).unwrap()).collect()
    }

    #[test]
    fn triangle_gives_the_star() {
        let l = CordSet::from_pairs(&[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        let order = is_2dtree(&l).unwrap();
        assert_eq!(order, taxa(&["a", "b", "c"]));
        let t = tree_from_2dtree(&l, &order).unwrap();
        assert_eq!(write_newick(&t), "(a:1,b:1,c:1);");
    }

    #[test]
    fn single_edge() {
        let l = CordSet::from_pairs(&[("a", "b")]).unwrap();
        assert_eq!(is_2dtree(&l), Some(taxa(&["a", "b"])));
    }

    #[test]
    fn five_cycle_is_rejected_by_count() {
        let l = CordSet::from_pairs(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "a")]).unwrap();
        assert_eq!(is_2dtree(&l), None);
        assert_eq!(is_2dtree_greedy(&l), None);
    }

    #[test]
    fn right_count_wrong_shape() {
        // K4 plus a pendant edge: 7 = 2*5-3 edges, but e has degree 1.
        let l = CordSet::from_pairs(&[
            ("a", "b"),
            ("a", "c"),
            ("a", "d"),
            ("b", "c"),
            ("b", "d"),
            ("c", "d"),
            ("d", "e"),
        ])
        .unwrap();
        assert_eq!(is_2dtree(&l), None);
        assert_eq!(is_2dtree_greedy(&l), None);
    }

    #[test]
    fn orderings_are_validated() {
        let l = CordSet::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("a", "d"), ("b", "d")]).unwrap();
        assert_eq!(validate_2dtree_ordering(&l, &taxa(&["a", "b", "c", "d"])), Ok(vec![(0, 1), (0, 1)]));
        assert!(matches!(
            validate_2dtree_ordering(&l, &taxa(&["c", "d", "a", "b"])),
            Err(TwoDTreeError::FirstPairNotACord(..))
        ));
        assert!(matches!(
            validate_2dtree_ordering(&l, &taxa(&["a", "c", "d", "b"])),
            Err(TwoDTreeError::BackDegree { .. })
        ));
        assert_eq!(
            validate_2dtree_ordering(&l, &taxa(&["a", "b", "c"])),
            Err(TwoDTreeError::NotAPermutation)
        );
    }

    #[test]
    fn quartet_construction_closes() {
        let l = CordSet::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("a", "d"), ("b", "d")]).unwrap();
        let order = is_2dtree(&l).unwrap();
        let t = tree_from_2dtree(&l, &order).unwrap();
        assert!(t.is_fully_resolved());
        // c splits the a-b edge; d then subdivides the a side of the
        // two-edge path.
        assert_eq!(order, taxa(&["a", "b", "c", "d"]));
        let expected = parse_newick("((a,d),(b,c));").unwrap();
        assert!(t.is_equivalent(&expected).unwrap(), "{}", write_newick(&t));
    }
}
