//! Stable transversals of `clus(T)` and the triplet covers they generate.
//!
//! A transversal assigns each cluster `A` of `T` a taxon `f(A) ∈ A`. It is
//! stable when `f(A) ∈ B ⊆ A` forces `f(B) = f(A)`. Stable transversals
//! generate `L_(T,f)`: at every interior vertex `v`, the images of the three
//! components of `T - v` pairwise joined by cords.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::cords::{Cord, CordSet};
use crate::tree::{Taxon, TreeError, XTree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("transversal has no value on cluster {{{}}}", join(.0))]
    NotTotal(Vec<Taxon>),
    #[error("{{{}}} is not a cluster of the tree", join(.0))]
    NotACluster(Vec<Taxon>),
    #[error("image {image} of cluster {{{}}} lies outside the cluster", join(.cluster))]
    NotTransversal { cluster: Vec<Taxon>, image: Taxon },
    #[error("transversal is not stable: f({{{}}}) lies in {{{}}} but images differ", join(.outer), join(.inner))]
    Unstable { outer: Vec<Taxon>, inner: Vec<Taxon> },
    #[error("ordering is not a permutation of the taxa")]
    OrderNotTotal,
    #[error("interior edges must have positive weight")]
    ImproperWeights,
}

fn join(taxa: &[Taxon]) -> String {
    taxa.iter().map(Taxon::as_str).collect::<Vec<_>>().join(",")
}

/// A partial map from clusters (taxon-index sets of one tree) to taxon
/// indices. [`is_stable`] checks it is total on `clus(T)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transversal {
    map: BTreeMap<FixedBitSet, usize>,
}

impl Transversal {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, cluster: FixedBitSet, image: usize) {
        self.map.insert(cluster, image);
    }

    pub fn get(&self, cluster: &FixedBitSet) -> Option<usize> {
        self.map.get(cluster).copied()
    }

    /// Sets `f(cluster) = image` by label. The cluster must be a cluster of
    /// `tree`.
    pub fn set_labels<S: AsRef<str>>(
        &mut self,
        tree: &XTree,
        cluster: &[S],
        image: &str,
    ) -> Result<(), CoverError> {
        let set = tree.taxon_set(cluster)?;
        if !tree.clusters().contains(&set) {
            return Err(CoverError::NotACluster(tree.labels_of(&set).cloned().collect()));
        }
        let image = tree.index_of(image)?;
        self.map.insert(set, image);
        Ok(())
    }

    /// Fills every cluster of `tree` without a value from `fallback`.
    pub fn completed_with(mut self, tree: &XTree, fallback: &Transversal) -> Transversal {
        for cluster in tree.clusters() {
            if let (std::collections::btree_map::Entry::Vacant(slot), Some(v)) =
                (self.map.entry(cluster.clone()), fallback.get(&cluster))
            {
                slot.insert(v);
            }
        }
        self
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FixedBitSet, usize)> {
        self.map.iter().map(|(k, &v)| (k, v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable,
    NotTransversal { cluster: Vec<Taxon>, image: Taxon },
    /// `f(outer) ∈ inner ⊆ outer` but `f(inner) != f(outer)`.
    Unstable { outer: Vec<Taxon>, inner: Vec<Taxon> },
}

impl Stability {
    pub fn is_stable(&self) -> bool {
        matches!(self, Stability::Stable)
    }
}

/// Checks transversality and stability of `f` on `clus(T)`. Outer clusters
/// are scanned by increasing size, so the reported witness has the smallest
/// possible outer cluster.
pub fn is_stable(f: &Transversal, tree: &XTree) -> Result<Stability, CoverError> {
    let clusters = tree.clusters();
    let labels = |set: &FixedBitSet| tree.labels_of(set).cloned().collect::<Vec<_>>();
    let mut images = Vec::with_capacity(clusters.len());
    for a in &clusters {
        let image = f.get(a).ok_or_else(|| CoverError::NotTotal(labels(a)))?;
        if !a.contains(image) {
            return Ok(Stability::NotTransversal {
                cluster: labels(a),
                image: tree.taxa()[image].clone(),
            });
        }
        images.push(image);
    }
    for (i, outer) in clusters.iter().enumerate() {
        for (j, inner) in clusters.iter().enumerate() {
            if i != j
                && inner.contains(images[i])
                && inner.is_subset(outer)
                && images[j] != images[i]
            {
                return Ok(Stability::Unstable {
                    outer: labels(outer),
                    inner: labels(inner),
                });
            }
        }
    }
    Ok(Stability::Stable)
}

fn ranks(tree: &XTree, order: &[Taxon]) -> Result<Vec<usize>, CoverError> {
    let n = tree.n_taxa();
    let mut rank = vec![usize::MAX; n];
    if order.len() != n {
        return Err(CoverError::OrderNotTotal);
    }
    for (r, taxon) in order.iter().enumerate() {
        let i = tree.index_of(taxon.as_str()).map_err(|_| CoverError::OrderNotTotal)?;
        if rank[i] != usize::MAX {
            return Err(CoverError::OrderNotTotal);
        }
        rank[i] = r;
    }
    Ok(rank)
}

/// `f(A) = min A` under `order`.
pub fn min_order_transversal(tree: &XTree, order: &[Taxon]) -> Result<Transversal, CoverError> {
    let rank = ranks(tree, order)?;
    let mut f = Transversal::new();
    for cluster in tree.clusters() {
        let image = cluster.ones().min_by_key(|&i| rank[i]).expect("clusters are non-empty");
        f.set(cluster, image);
    }
    Ok(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafChoice {
    Closest,
    Furthest,
}

/// For each cluster `A`, defined by the edge `e` whose removal cuts it off,
/// collects the leaves of `A` closest to (or furthest from) `e` and picks
/// the `tiebreak`-minimum among them.
///
/// Distances are compared exactly (weights are converted to rationals), so
/// ties are exact ties of the given weights. Inexact comparison could break
/// stability, which relies on distances within a sub-cluster differing from
/// the enclosing cluster's by a constant offset.
pub fn closest_leaf_transversal(
    tree: &XTree,
    mode: LeafChoice,
    tiebreak: &[Taxon],
) -> Result<Transversal, CoverError> {
    if !tree.is_properly_weighted() {
        return Err(CoverError::ImproperWeights);
    }
    let rank = ranks(tree, tiebreak)?;
    let weights: Vec<BigRational> = tree
        .edges()
        .iter()
        .map(|e| BigRational::from_float(e.weight()).expect("weights are finite"))
        .collect();

    let mut f = Transversal::new();
    for (e, edge) in tree.edges().iter().enumerate() {
        let (u, v) = edge.endpoints();
        for (start, blocked) in [(u, e), (v, e)] {
            let mut best: Option<(BigRational, usize)> = None;
            let mut stack = vec![(start, usize::MAX, BigRational::zero())];
            let mut cluster = FixedBitSet::with_capacity(tree.n_taxa());
            while let Some((x, parent, dist)) = stack.pop() {
                if let Some(t) = tree.taxon_at(x) {
                    cluster.insert(t);
                    let better = match &best {
                        None => true,
                        Some((d, bt)) => {
                            let ord = match mode {
                                LeafChoice::Closest => dist.cmp(d),
                                LeafChoice::Furthest => d.cmp(&dist),
                            };
                            ord.then(rank[t].cmp(&rank[*bt])).is_lt()
                        }
                    };
                    if better {
                        best = Some((dist.clone(), t));
                    }
                }
                for &(y, ey) in tree.neighbors(x) {
                    if y != parent && ey != blocked {
                        stack.push((y, x, &dist + &weights[ey]));
                    }
                }
            }
            f.set(cluster, best.expect("every side holds a leaf").1);
        }
    }
    Ok(f)
}

/// The three built-in ways of choosing a stable transversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransversalRule {
    Min,
    Closest,
    Furthest,
}

/// Builds a transversal by `rule`; `order` ranks taxa for the min rule and
/// breaks distance ties for the other two.
pub fn transversal_by_rule(tree: &XTree, rule: TransversalRule, order: &[Taxon]) -> Result<Transversal, CoverError> {
    match rule {
        TransversalRule::Min => min_order_transversal(tree, order),
        TransversalRule::Closest => closest_leaf_transversal(tree, LeafChoice::Closest, order),
        TransversalRule::Furthest => closest_leaf_transversal(tree, LeafChoice::Furthest, order),
    }
}

/// `L_(T,f)`. Unless `force` is set, `f` must be stable; a forced,
/// non-stable `f` still has to be a transversal and yields a plain
/// triplet cover.
pub fn triplet_cover(tree: &XTree, f: &Transversal, force: bool) -> Result<CordSet, CoverError> {
    tree.require_fully_resolved()?;
    match is_stable(f, tree)? {
        Stability::Stable => {}
        Stability::NotTransversal { cluster, image } => {
            return Err(CoverError::NotTransversal { cluster, image })
        }
        Stability::Unstable { outer, inner } => {
            if !force {
                return Err(CoverError::Unstable { outer, inner });
            }
        }
    }
    let mut cords = CordSet::new().with_taxa(tree.taxa());
    for v in tree.interior_vertices() {
        let images: Vec<&Taxon> = tree
            .components_at(v)
            .iter()
            .map(|c| &tree.taxa()[f.get(&c.leaves).expect("checked total")])
            .collect();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            cords.insert(Cord::new(images[i].clone(), images[j].clone()).expect("disjoint components"));
        }
    }
    Ok(cords)
}

/// Component id (0, 1, 2) of every taxon at interior vertex `v`.
fn component_ids(tree: &XTree, v: usize) -> Vec<u8> {
    let mut id = vec![0u8; tree.n_taxa()];
    for (k, c) in tree.components_at(v).iter().enumerate() {
        for t in c.leaves.ones() {
            id[t] = k as u8;
        }
    }
    id
}

/// Every interior vertex has, for each pair of its three components, a
/// cord joining them.
pub fn is_cover(tree: &XTree, cords: &CordSet) -> Result<bool, CoverError> {
    tree.require_fully_resolved()?;
    let pairs = cords.index_pairs(tree)?;
    for v in tree.interior_vertices() {
        let id = component_ids(tree, v);
        let mut seen = [false; 3];
        for &(x, y) in &pairs {
            let (a, b) = (id[x], id[y]);
            if a != b {
                seen[(3 - a - b) as usize] = true;
            }
        }
        if seen.contains(&false) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every interior vertex has a triangle of cords with one corner in each
/// of its three components.
pub fn is_triplet_cover(tree: &XTree, cords: &CordSet) -> Result<bool, CoverError> {
    tree.require_fully_resolved()?;
    let n = tree.n_taxa();
    let pairs = cords.index_pairs(tree)?;
    let mut nbrs = vec![FixedBitSet::with_capacity(n); n];
    for &(x, y) in &pairs {
        nbrs[x].insert(y);
        nbrs[y].insert(x);
    }
    for v in tree.interior_vertices() {
        let comps = tree.components_at(v);
        let id = component_ids(tree, v);
        let found = pairs.iter().any(|&(x, y)| {
            let (a, b) = (id[x], id[y]);
            a != b && {
                let third = &comps[(3 - a - b) as usize].leaves;
                nbrs[x].intersection(&nbrs[y]).any(|z| third.contains(z))
            }
        });
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}
