//! Unrooted X-trees: leaf-labelled trees without degree-2 vertices.
//!
//! An [`XTree`] is immutable once built. Vertices are dense `usize` ids with
//! no meaning beyond the value they hold; taxa are kept sorted by label and
//! most queries address them by their index in that order, so taxon sets
//! (clusters, split sides) are [`FixedBitSet`]s over taxon indices.
//!
//! Construction goes through [`TreeBuilder`], which prunes unlabelled
//! leaves, suppresses degree-2 vertices by summing their two edge weights,
//! and validates the result.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error("invalid taxon label {0:?}")]
    InvalidLabel(String),
    #[error("unknown taxon {0:?}")]
    UnknownTaxon(String),
    #[error("duplicate taxon {0:?}")]
    DuplicateTaxon(String),
    #[error("need at least {needed} taxa, got {got}")]
    TooFewTaxa { needed: usize, got: usize },
    #[error("graph is not a tree")]
    NotATree,
    #[error("taxon {0:?} labels a vertex of degree greater than one")]
    LabeledInteriorVertex(String),
    #[error("edge weight {0} is negative or not finite")]
    InvalidWeight(f64),
    #[error("tree is not fully resolved")]
    NotFullyResolved,
    #[error("trees are on different taxon sets")]
    LeafSetMismatch,
    #[error("quartet taxa must be four distinct taxa")]
    QuartetNotDistinct,
}

/// A leaf label: `[A-Za-z0-9_.-]+`, optionally followed by prime marks
/// (`a'`, `b''`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Taxon(String);

impl Taxon {
    pub fn new(label: impl Into<String>) -> Result<Self, TreeError> {
        let label = label.into();
        if Self::is_valid(&label) {
            Ok(Taxon(label))
        } else {
            Err(TreeError::InvalidLabel(label))
        }
    }

    pub fn is_valid(label: &str) -> bool {
        let body = label.trim_end_matches('\'');
        !body.is_empty()
            && body
                .bytes()
                .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'-'))
    }

    pub(crate) fn label_char(c: char) -> bool {
        c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-' | '\'')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Taxon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Taxon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl AsRef<str> for Taxon {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Taxon {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl std::str::FromStr for Taxon {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Taxon::new(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    ends: (usize, usize),
    weight: f64,
}

impl Edge {
    pub fn endpoints(&self) -> (usize, usize) {
        self.ends
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// The endpoint that is not `v`.
    pub fn other(&self, v: usize) -> usize {
        if self.ends.0 == v {
            self.ends.1
        } else {
            self.ends.0
        }
    }
}

/// The bipartition of the taxa induced by deleting one edge.
///
/// `side_a` always holds the smallest taxon (index 0).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Split {
    pub side_a: FixedBitSet,
    pub side_b: FixedBitSet,
}

impl Split {
    fn from_side(side: FixedBitSet) -> Split {
        let mut other = side.clone();
        other.toggle_range(..);
        if side.contains(0) {
            Split { side_a: side, side_b: other }
        } else {
            Split { side_a: other, side_b: side }
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.side_a.count_ones(..) <= 1 || self.side_b.count_ones(..) <= 1
    }

    pub fn separates(&self, x: usize, y: usize) -> bool {
        self.side_a.contains(x) != self.side_a.contains(y)
    }
}

/// One connected component of `T - v`, seen from `v`.
#[derive(Clone, Debug)]
pub struct Component {
    pub neighbor: usize,
    pub edge: usize,
    pub leaves: FixedBitSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuartetTopology {
    /// `left[0] left[1] || right[0] right[1]`; `left` holds the smallest
    /// label and both pairs are sorted.
    Resolved { left: [Taxon; 2], right: [Taxon; 2] },
    Star,
}

impl QuartetTopology {
    fn resolved(a: &Taxon, b: &Taxon, c: &Taxon, d: &Taxon) -> Self {
        let mut left = [a.clone(), b.clone()];
        let mut right = [c.clone(), d.clone()];
        left.sort();
        right.sort();
        if right[0] < left[0] {
            std::mem::swap(&mut left, &mut right);
        }
        QuartetTopology::Resolved { left, right }
    }

    /// True iff this is the quartet `ab||cd` (in any presentation).
    pub fn is(&self, a: &str, b: &str, c: &str, d: &str) -> bool {
        match self {
            QuartetTopology::Star => false,
            QuartetTopology::Resolved { left, right } => {
                let pair = |p: &[Taxon; 2], x: &str, y: &str| {
                    (p[0].as_str() == x && p[1].as_str() == y)
                        || (p[0].as_str() == y && p[1].as_str() == x)
                };
                (pair(left, a, b) && pair(right, c, d)) || (pair(left, c, d) && pair(right, a, b))
            }
        }
    }
}

impl fmt::Display for QuartetTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuartetTopology::Star => f.write_str("star"),
            QuartetTopology::Resolved { left, right } => {
                write!(f, "{}{}||{}{}", left[0], left[1], right[0], right[1])
            }
        }
    }
}

/// Which pairing of four taxa `[a, b, c, d]` a hop matrix resolves:
/// `0` = `ab||cd`, `1` = `ac||bd`, `2` = `ad||bc`, `None` = star.
///
/// Uses the four-point condition on unit edge lengths, which is exact for
/// every X-tree.
pub(crate) fn quartet_pairing(hops: &[u32], n: usize, q: [usize; 4]) -> Option<u8> {
    let h = |x: usize, y: usize| hops[x * n + y];
    let [a, b, c, d] = q;
    let sums = [h(a, b) + h(c, d), h(a, c) + h(b, d), h(a, d) + h(b, c)];
    let min = *sums.iter().min().unwrap();
    let mut winner = None;
    for (i, &s) in sums.iter().enumerate() {
        if s == min {
            if winner.is_some() {
                return None;
            }
            winner = Some(i as u8);
        }
    }
    winner
}

#[derive(Clone, Debug)]
pub struct XTree {
    taxa: Vec<Taxon>,
    leaf_of: Vec<usize>,
    taxon_at: Vec<Option<usize>>,
    adj: Vec<Vec<(usize, usize)>>,
    edges: Vec<Edge>,
}

impl XTree {
    pub fn taxa(&self) -> &[Taxon] {
        &self.taxa
    }

    pub fn n_taxa(&self) -> usize {
        self.taxa.len()
    }

    pub fn taxon_index(&self, label: &str) -> Option<usize> {
        self.taxa.binary_search_by(|t| t.as_str().cmp(label)).ok()
    }

    pub fn index_of(&self, label: &str) -> Result<usize, TreeError> {
        self.taxon_index(label)
            .ok_or_else(|| TreeError::UnknownTaxon(label.to_string()))
    }

    /// Vertex carrying taxon `taxon`.
    pub fn leaf(&self, taxon: usize) -> usize {
        self.leaf_of[taxon]
    }

    pub fn taxon_at(&self, vertex: usize) -> Option<usize> {
        self.taxon_at[vertex]
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// `(neighbor, edge id)` pairs around `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(|&v| self.taxon_at[v].is_none())
    }

    pub fn is_fully_resolved(&self) -> bool {
        self.interior_vertices().all(|v| self.degree(v) == 3)
    }

    pub fn is_pendant(&self, e: usize) -> bool {
        let (u, v) = self.edges[e].ends;
        self.taxon_at[u].is_some() || self.taxon_at[v].is_some()
    }

    /// Every interior edge carries a strictly positive weight.
    pub fn is_properly_weighted(&self) -> bool {
        (0..self.edges.len()).all(|e| self.is_pendant(e) || self.edges[e].weight > 0.0)
    }

    pub(crate) fn require_fully_resolved(&self) -> Result<(), TreeError> {
        if self.is_fully_resolved() {
            Ok(())
        } else {
            Err(TreeError::NotFullyResolved)
        }
    }

    /// Same topology with every edge weight replaced by `weight(edge_id)`.
    pub fn reweighted(&self, mut weight: impl FnMut(usize) -> f64) -> Result<XTree, TreeError> {
        let mut tree = self.clone();
        for (e, edge) in tree.edges.iter_mut().enumerate() {
            let w = weight(e);
            if !(w.is_finite() && w >= 0.0) {
                return Err(TreeError::InvalidWeight(w));
            }
            edge.weight = w;
        }
        Ok(tree)
    }

    pub fn with_unit_weights(&self) -> XTree {
        self.reweighted(|_| 1.0).expect("unit weights are valid")
    }

    /// Weighted path length between two taxa. Edges are summed in path
    /// order starting from the taxon with the smaller index.
    pub fn path_distance(&self, x: &str, y: &str) -> Result<f64, TreeError> {
        let (i, j) = (self.index_of(x)?, self.index_of(y)?);
        let (i, j) = (i.min(j), i.max(j));
        Ok(self.distances_from(i)[j])
    }

    /// Weighted distances from leaf `taxon` to every taxon.
    fn distances_from(&self, taxon: usize) -> Vec<f64> {
        let mut by_vertex = vec![0.0; self.vertex_count()];
        let start = self.leaf_of[taxon];
        let mut stack = vec![(start, usize::MAX)];
        while let Some((v, parent)) = stack.pop() {
            for &(u, e) in &self.adj[v] {
                if u != parent {
                    by_vertex[u] = by_vertex[v] + self.edges[e].weight;
                    stack.push((u, v));
                }
            }
        }
        self.leaf_of.iter().map(|&v| by_vertex[v]).collect()
    }

    /// Row-major `n x n` matrix of weighted leaf distances. Entry `(i, j)`
    /// and `(j, i)` are both taken from the walk out of `min(i, j)`, so the
    /// matrix is exactly symmetric and agrees with [`XTree::path_distance`].
    pub fn distance_matrix(&self) -> Vec<f64> {
        let n = self.n_taxa();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let row = self.distances_from(i);
            for j in i + 1..n {
                out[i * n + j] = row[j];
                out[j * n + i] = row[j];
            }
        }
        out
    }

    /// Row-major `n x n` matrix of edge counts between leaves.
    pub fn hop_matrix(&self) -> Vec<u32> {
        let n = self.n_taxa();
        let mut out = vec![0; n * n];
        let mut by_vertex = vec![0u32; self.vertex_count()];
        for i in 0..n {
            let start = self.leaf_of[i];
            by_vertex[start] = 0;
            let mut stack = vec![(start, usize::MAX)];
            while let Some((v, parent)) = stack.pop() {
                for &(u, _) in &self.adj[v] {
                    if u != parent {
                        by_vertex[u] = by_vertex[v] + 1;
                        stack.push((u, v));
                    }
                }
            }
            for j in 0..n {
                out[i * n + j] = by_vertex[self.leaf_of[j]];
            }
        }
        out
    }

    /// Edge ids on the path between two taxa, in order from `from`.
    pub fn path_edges(&self, from: usize, to: usize) -> Vec<usize> {
        self.vertex_path_edges(self.leaf_of[from], self.leaf_of[to])
    }

    pub(crate) fn vertex_path_edges(&self, from: usize, to: usize) -> Vec<usize> {
        let mut parent_edge = vec![usize::MAX; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[to] = true;
        let mut stack = vec![to];
        while let Some(v) = stack.pop() {
            if v == from {
                break;
            }
            for &(u, e) in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    parent_edge[u] = e;
                    stack.push(u);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = from;
        while v != to {
            let e = parent_edge[v];
            path.push(e);
            v = self.edges[e].other(v);
        }
        path
    }

    /// Taxa reachable from `start` without crossing edge `blocked`.
    pub fn side(&self, blocked: usize, start: usize) -> FixedBitSet {
        let mut leaves = FixedBitSet::with_capacity(self.n_taxa());
        let mut stack = vec![(start, usize::MAX)];
        while let Some((v, parent)) = stack.pop() {
            if let Some(t) = self.taxon_at[v] {
                leaves.insert(t);
            }
            for &(u, e) in &self.adj[v] {
                if u != parent && e != blocked {
                    stack.push((u, v));
                }
            }
        }
        leaves
    }

    /// The components of `T - v`, in neighbor order.
    pub fn components_at(&self, v: usize) -> Vec<Component> {
        self.adj[v]
            .iter()
            .map(|&(neighbor, edge)| Component {
                neighbor,
                edge,
                leaves: self.side(edge, neighbor),
            })
            .collect()
    }

    /// One split per edge, indexed by edge id.
    pub fn splits(&self) -> Vec<Split> {
        (0..self.edges.len())
            .map(|e| Split::from_side(self.side(e, self.edges[e].ends.0)))
            .collect()
    }

    /// `clus(T)`: both sides of every edge split, deduplicated, ordered by
    /// size and then by bit pattern.
    pub fn clusters(&self) -> Vec<FixedBitSet> {
        let mut set = BTreeSet::new();
        for split in self.splits() {
            set.insert(split.side_a);
            set.insert(split.side_b);
        }
        let mut out: Vec<_> = set.into_iter().collect();
        out.sort_by_key(|c| c.count_ones(..));
        out
    }

    pub fn labels_of<'a>(&'a self, set: &'a FixedBitSet) -> impl Iterator<Item = &'a Taxon> + 'a {
        set.ones().map(|i| &self.taxa[i])
    }

    /// Taxon-index bit set for a list of labels.
    pub fn taxon_set<S: AsRef<str>>(&self, labels: &[S]) -> Result<FixedBitSet, TreeError> {
        let mut set = FixedBitSet::with_capacity(self.n_taxa());
        for label in labels {
            set.insert(self.index_of(label.as_ref())?);
        }
        Ok(set)
    }

    /// Non-trivial splits keyed by the side without taxon 0.
    fn nontrivial_split_keys(&self) -> BTreeSet<FixedBitSet> {
        self.splits()
            .into_iter()
            .filter(|s| !s.is_trivial())
            .map(|s| s.side_b)
            .collect()
    }

    /// Edge weight per split, keyed by the side without taxon 0.
    pub fn split_weights(&self) -> BTreeMap<FixedBitSet, f64> {
        self.splits()
            .into_iter()
            .zip(&self.edges)
            .map(|(s, e)| (s.side_b, e.weight))
            .collect()
    }

    /// Topological equivalence: same leaf set and same split set. Weights
    /// are ignored; compare [`XTree::split_weights`] for that.
    pub fn is_equivalent(&self, other: &XTree) -> Result<bool, TreeError> {
        if self.taxa != other.taxa {
            return Err(TreeError::LeafSetMismatch);
        }
        Ok(self.nontrivial_split_keys() == other.nontrivial_split_keys())
    }

    /// Largest per-split weight difference between equivalent trees, or
    /// `None` when the trees are not equivalent.
    pub fn max_weight_difference(&self, other: &XTree) -> Result<Option<f64>, TreeError> {
        if !self.is_equivalent(other)? {
            return Ok(None);
        }
        let mine = self.split_weights();
        let theirs = other.split_weights();
        Ok(Some(
            mine.iter()
                .map(|(k, w)| (w - theirs[k]).abs())
                .fold(0.0, f64::max),
        ))
    }

    /// Pairs of leaves that share their neighbor.
    pub fn cherries(&self) -> Vec<(Taxon, Taxon)> {
        let mut out = Vec::new();
        for v in self.interior_vertices() {
            let mut leaves: Vec<usize> = self.adj[v]
                .iter()
                .filter_map(|&(u, _)| self.taxon_at[u])
                .collect();
            leaves.sort_unstable();
            for (i, &x) in leaves.iter().enumerate() {
                for &y in &leaves[i + 1..] {
                    out.push((self.taxa[x].clone(), self.taxa[y].clone()));
                }
            }
        }
        out.sort();
        out
    }

    /// Topology of `T|{a,b,c,d}`.
    pub fn quartet_topology(
        &self,
        a: &str,
        b: &str,
        c: &str,
        d: &str,
    ) -> Result<QuartetTopology, TreeError> {
        let q = [self.index_of(a)?, self.index_of(b)?, self.index_of(c)?, self.index_of(d)?];
        let distinct: BTreeSet<_> = q.iter().collect();
        if distinct.len() != 4 {
            return Err(TreeError::QuartetNotDistinct);
        }
        // Only four leaves are involved; a full hop matrix is not needed.
        let mut hops = vec![0u32; 16];
        for i in 0..4 {
            for j in 0..4 {
                hops[i * 4 + j] = self.path_edges(q[i], q[j]).len() as u32;
            }
        }
        let t = |i: usize| &self.taxa[q[i]];
        Ok(match quartet_pairing(&hops, 4, [0, 1, 2, 3]) {
            None => QuartetTopology::Star,
            Some(0) => QuartetTopology::resolved(t(0), t(1), t(2), t(3)),
            Some(1) => QuartetTopology::resolved(t(0), t(2), t(1), t(3)),
            Some(_) => QuartetTopology::resolved(t(0), t(3), t(1), t(2)),
        })
    }

    /// `T|Y`: the subtree spanning `labels`, with degree-2 vertices
    /// suppressed and their edge weights summed.
    pub fn restrict<S: AsRef<str>>(&self, labels: &[S]) -> Result<XTree, TreeError> {
        let keep = self.taxon_set(labels)?;
        let total = keep.count_ones(..);
        if total < 2 {
            return Err(TreeError::TooFewTaxa { needed: 2, got: total });
        }
        let root = self.leaf_of[keep.ones().next().unwrap()];

        // Post-order count of kept leaves below each vertex.
        let mut order = Vec::with_capacity(self.vertex_count());
        let mut parent = vec![(usize::MAX, usize::MAX); self.vertex_count()];
        let mut stack = vec![root];
        let mut seen = vec![false; self.vertex_count()];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &(u, e) in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = (v, e);
                    stack.push(u);
                }
            }
        }
        let mut below = vec![0usize; self.vertex_count()];
        for &v in order.iter().rev() {
            if let Some(t) = self.taxon_at[v] {
                if keep.contains(t) {
                    below[v] += 1;
                }
            }
            if v != root {
                below[parent[v].0] += below[v];
            }
        }

        let mut builder = TreeBuilder::new();
        let mut new_id = vec![usize::MAX; self.vertex_count()];
        new_id[root] = builder.add_vertex(Some(self.taxa[self.taxon_at[root].unwrap()].clone()));
        for &v in &order[1..] {
            let (p, e) = parent[v];
            // The root is kept, so an edge lies between kept leaves exactly
            // when something kept hangs below it.
            if below[v] == 0 {
                continue;
            }
            let label = self.taxon_at[v]
                .filter(|&t| keep.contains(t))
                .map(|t| self.taxa[t].clone());
            new_id[v] = builder.add_vertex(label);
            builder.add_edge(new_id[p], new_id[v], self.edges[e].weight);
        }
        builder.build()
    }
}

/// Mutable graph used to assemble an [`XTree`].
#[derive(Clone, Debug, Default)]
pub struct TreeBuilder {
    labels: Vec<Option<Taxon>>,
    edges: Vec<(usize, usize, f64)>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, label: Option<Taxon>) -> usize {
        self.labels.push(label);
        self.labels.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: f64) {
        self.edges.push((u, v, weight));
    }

    pub fn build(self) -> Result<XTree, TreeError> {
        self.finish(false)
    }

    /// Like [`TreeBuilder::build`], but first contracts every interior edge
    /// of weight exactly zero, yielding a possibly multifurcating tree.
    pub fn build_contracting_zero_interior(self) -> Result<XTree, TreeError> {
        self.finish(true)
    }

    fn finish(self, contract_zero: bool) -> Result<XTree, TreeError> {
        let nv = self.labels.len();
        for &(_, _, w) in &self.edges {
            if !(w.is_finite() && w >= 0.0) {
                return Err(TreeError::InvalidWeight(w));
            }
        }
        let mut seen_labels = BTreeSet::new();
        for label in self.labels.iter().flatten() {
            if !seen_labels.insert(label.clone()) {
                return Err(TreeError::DuplicateTaxon(label.to_string()));
            }
        }
        if nv == 0 || self.edges.len() != nv - 1 || !connected(nv, &self.edges) {
            return Err(TreeError::NotATree);
        }

        let mut edges: Vec<Option<(usize, usize, f64)>> = self.edges.into_iter().map(Some).collect();
        let mut incident: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nv];
        for (e, edge) in edges.iter().enumerate() {
            let (u, v, _) = edge.unwrap();
            incident[u].insert(e);
            incident[v].insert(e);
        }
        let labels = self.labels;
        let mut alive = vec![true; nv];

        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..nv {
                if !alive[v] || labels[v].is_some() {
                    continue;
                }
                match incident[v].len() {
                    0 if alive.iter().filter(|&&a| a).count() > 1 => {
                        alive[v] = false;
                        changed = true;
                    }
                    1 => {
                        let e = *incident[v].iter().next().unwrap();
                        let (a, b, _) = edges[e].take().unwrap();
                        let other = if a == v { b } else { a };
                        incident[other].remove(&e);
                        incident[v].clear();
                        alive[v] = false;
                        changed = true;
                    }
                    2 => {
                        let mut it = incident[v].iter();
                        let (e1, e2) = (*it.next().unwrap(), *it.next().unwrap());
                        let (a1, b1, w1) = edges[e1].take().unwrap();
                        let (a2, b2, w2) = edges[e2].take().unwrap();
                        let x = if a1 == v { b1 } else { a1 };
                        let y = if a2 == v { b2 } else { a2 };
                        incident[x].remove(&e1);
                        incident[y].remove(&e2);
                        incident[v].clear();
                        alive[v] = false;
                        edges.push(Some((x, y, w1 + w2)));
                        let id = edges.len() - 1;
                        incident[x].insert(id);
                        incident[y].insert(id);
                        changed = true;
                    }
                    _ => {}
                }
            }
        }

        if contract_zero {
            loop {
                let target = edges.iter().enumerate().find_map(|(e, edge)| match edge {
                    Some((u, v, w))
                        if *w == 0.0 && labels[*u].is_none() && labels[*v].is_none() =>
                    {
                        Some((e, *u, *v))
                    }
                    _ => None,
                });
                let Some((e, keep, gone)) = target else { break };
                edges[e] = None;
                incident[keep].remove(&e);
                incident[gone].remove(&e);
                for moved in std::mem::take(&mut incident[gone]) {
                    let edge = edges[moved].as_mut().unwrap();
                    if edge.0 == gone {
                        edge.0 = keep;
                    } else {
                        edge.1 = keep;
                    }
                    incident[keep].insert(moved);
                }
                alive[gone] = false;
            }
        }

        for v in 0..nv {
            if alive[v] {
                if let Some(label) = &labels[v] {
                    if incident[v].len() > 1 {
                        return Err(TreeError::LabeledInteriorVertex(label.to_string()));
                    }
                }
            }
        }

        let mut taxa: Vec<Taxon> = (0..nv)
            .filter(|&v| alive[v])
            .filter_map(|v| labels[v].clone())
            .collect();
        taxa.sort();
        if taxa.len() < 2 {
            return Err(TreeError::TooFewTaxa { needed: 2, got: taxa.len() });
        }

        let mut new_id = vec![usize::MAX; nv];
        let mut count = 0;
        for v in 0..nv {
            if alive[v] {
                new_id[v] = count;
                count += 1;
            }
        }
        let mut taxon_at = vec![None; count];
        let mut leaf_of = vec![0; taxa.len()];
        for v in 0..nv {
            if let (true, Some(label)) = (alive[v], &labels[v]) {
                let t = taxa.binary_search(label).unwrap();
                taxon_at[new_id[v]] = Some(t);
                leaf_of[t] = new_id[v];
            }
        }
        let mut adj = vec![Vec::new(); count];
        let mut out_edges = Vec::new();
        for (u, v, w) in edges.into_iter().flatten() {
            let (u, v) = (new_id[u], new_id[v]);
            let id = out_edges.len();
            out_edges.push(Edge { ends: (u, v), weight: w });
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        Ok(XTree {
            taxa,
            leaf_of,
            taxon_at,
            adj,
            edges: out_edges,
        })
    }
}

fn connected(nv: usize, edges: &[(usize, usize, f64)]) -> bool {
    let mut adj = vec![Vec::new(); nv];
    for &(u, v, _) in edges {
        if u >= nv || v >= nv {
            return false;
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; nv];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    count == nv
}
