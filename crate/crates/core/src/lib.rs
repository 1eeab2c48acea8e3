//! Reconstructing fully-resolved weighted phylogenetic trees from distances
//! known only on some leaf pairs.
//!
//! The pieces, bottom up: [`tree`] (X-trees and their structure), [`newick`]
//! (I/O), [`cords`] (cord sets and partial distances), [`cover`] (stable
//! transversals and triplet covers), [`lasso`] (closure, shellability,
//! 2d-trees, certificates) and [`mod@reconstruct`] (closure followed by
//! Neighbor-Joining).
//!
//! ```
//! use lasso_core::*;
//!
//! let tree = parse_newick("((a:1,b:2):0.5,c:1,(d:3,e:1):2);")?;
//! let f = transversal_by_rule(&tree, TransversalRule::Min, tree.taxa())?;
//! let cover = triplet_cover(&tree, &f, false)?;
//! assert_eq!(cover.len(), 7);
//! let d = induced_distance(&tree, &cover)?;
//! let rebuilt = reconstruct(&d, &Tolerance::default())?;
//! assert!(rebuilt.tree().unwrap().is_equivalent(&tree)?);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod cords;
pub mod cover;
pub mod fixtures;
pub mod lasso;
pub mod newick;
pub mod numeric;
pub mod random;
pub mod reconstruct;
pub mod tree;

pub use cords::{
    graph_necessary_checks, induced_distance, parse_cord_distances, parse_cord_distances_exact,
    Cord, CordError, CordSet, GraphChecks, PartialDistance,
};
pub use cover::{
    closest_leaf_transversal, is_cover, is_stable, is_triplet_cover, min_order_transversal,
    transversal_by_rule, triplet_cover, CoverError, LeafChoice, Stability, Transversal,
    TransversalRule,
};
pub use newick::{parse_newick, write_newick, NewickError};
pub use numeric::{Distance, Tolerance, DEFAULT_EPSILON};
pub use random::random_tree;
pub use reconstruct::{neighbor_joining, reconstruct, ReconstructError, Reconstruction};
pub use tree::{QuartetTopology, Split, Taxon, TreeBuilder, TreeError, XTree};
