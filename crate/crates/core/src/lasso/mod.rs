//! Lasso classification: rule-(R) closure, shellability, 2d-tree
//! recognition, the edge-weight rank certificate, and a small-n
//! topological oracle.

mod closure;
mod oracle;
mod rank;
mod shelling;
mod simplex;
mod twodtree;

pub use closure::{closure, ClosureError, ClosureStep, ClosureTrace};
pub use oracle::{topological_lasso_oracle, OracleError, TopologicalVerdict, ORACLE_MAX_TAXA};
pub use rank::{
    edge_weight_lasso_certificate, incidence_rank, path_incidence_matrix, rank_bigint, rank_i128,
};
pub use shelling::{
    is_shellable, is_shellable_with_rng, validate_shelling, Shelling, ShellingStep,
    ShellingTrace, ShellingViolation,
};
pub use twodtree::{
    is_2dtree, is_2dtree_greedy, tree_from_2dtree, validate_2dtree_ordering, TwoDTreeError,
};
