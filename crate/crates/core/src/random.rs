//! Seeded random fully-resolved trees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tree::{Taxon, TreeBuilder, TreeError, XTree};

/// Labels `t1..tn`, zero-padded so label order matches numeric order.
pub fn default_labels(n: usize) -> Vec<Taxon> {
    let width = n.to_string().len();
    (1..=n)
        .map(|i| Taxon::new(format!("t{i:0width$}")).unwrap())
        .collect()
}

/// Random fully-resolved tree on `n` taxa with weights drawn uniformly
/// from `[lo, hi]`. The topology is uniform over all `(2n-5)!!`
/// fully-resolved trees (each leaf is attached to a uniformly chosen edge
/// of the tree built so far).
pub fn random_tree(n: usize, seed: u64, weight_range: (f64, f64)) -> Result<XTree, TreeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tree_with_rng(&default_labels(n), &mut rng, weight_range)
}

pub fn random_tree_with_rng<R: Rng + ?Sized>(
    labels: &[Taxon],
    rng: &mut R,
    (lo, hi): (f64, f64),
) -> Result<XTree, TreeError> {
    let n = labels.len();
    if n < 3 {
        return Err(TreeError::TooFewTaxa { needed: 3, got: n });
    }
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(TreeError::InvalidWeight(lo));
    }

    let mut builder = TreeBuilder::new();
    let center = builder.add_vertex(None);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(2 * n - 3);
    for label in &labels[..3] {
        let leaf = builder.add_vertex(Some(label.clone()));
        edges.push((center, leaf));
    }
    for label in &labels[3..] {
        let slot = rng.gen_range(0..edges.len());
        let (u, v) = edges[slot];
        let mid = builder.add_vertex(None);
        let leaf = builder.add_vertex(Some(label.clone()));
        edges[slot] = (u, mid);
        edges.push((mid, v));
        edges.push((mid, leaf));
    }
    for (u, v) in edges {
        let w = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
        builder.add_edge(u, v, w);
    }
    builder.build()
}

/// A uniformly random total order of the tree's taxa.
pub fn random_order<R: Rng + ?Sized>(tree: &XTree, rng: &mut R) -> Vec<Taxon> {
    let mut order = tree.taxa().to_vec();
    order.shuffle(rng);
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::write_newick;

    #[test]
    fn three_taxa_is_the_star() {
        let t = random_tree(3, 9, (0.5, 2.0)).unwrap();
        assert_eq!(t.edges().len(), 3);
        assert_eq!(t.interior_vertices().count(), 1);
    }

    #[test]
    fn edge_count_and_resolution() {
        for seed in 0..20 {
            let t = random_tree(5, seed, (0.1, 1.0)).unwrap();
            assert_eq!(t.edges().len(), 7);
            assert!(t.is_fully_resolved());
            assert!(t.edges().iter().all(|e| (0.1..=1.0).contains(&e.weight())));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = random_tree(12, 42, (0.1, 1.0)).unwrap();
        let b = random_tree(12, 42, (0.1, 1.0)).unwrap();
        let c = random_tree(12, 43, (0.1, 1.0)).unwrap();
        assert_eq!(write_newick(&a), write_newick(&b));
        assert_ne!(write_newick(&a), write_newick(&c));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(random_tree(2, 0, (1.0, 1.0)).is_err());
        assert!(random_tree(5, 0, (0.0, 1.0)).is_err());
        assert!(random_tree(5, 0, (2.0, 1.0)).is_err());
    }

    #[test]
    fn topologies_are_roughly_uniform() {
        // 15 topologies on 5 taxa; 3000 draws put ~200 in each.
        let mut counts = std::collections::BTreeMap::new();
        for seed in 0..3000 {
            let t = random_tree(5, seed, (1.0, 1.0)).unwrap();
            *counts.entry(write_newick(&t)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 15);
        assert!(counts.values().all(|&c| (120..=290).contains(&c)), "{counts:?}");
    }

    #[test]
    fn labels_sort_numerically() {
        let labels = default_labels(12);
        assert_eq!(labels[0].as_str(), "t01");
        assert!(labels.windows(2).all(|w| w[0] < w[1]));
    }
}
