//! Small worked instances shared by the test suites.

use crate::cords::{Cord, CordSet};
use crate::cover::Transversal;
use crate::lasso::ShellingStep;
use crate::newick::parse_newick;
use crate::tree::{Taxon, XTree};

fn taxa(labels: &[&str]) -> Vec<Taxon> {
    labels.iter().map(|s| Taxon::new(*s).expect("valid label")).collect()
}

/// The seven-taxon caterpillar with cherries `{a,b}` and `{f,g}`, all
/// weights 1: `d(a,b) = 2`, `d(c,e) = 4`, `d(c,f) = 5`.
pub fn caterpillar7() -> XTree {
    parse_newick(CATERPILLAR7_NEWICK).expect("valid fixture")
}

pub const CATERPILLAR7_NEWICK: &str = "((a,b),c,(d,(e,(f,g))));";

/// An eleven-cord shellable lasso of [`caterpillar7`].
pub fn caterpillar7_lasso() -> CordSet {
    CordSet::from_pairs(&[
        ("a", "b"),
        ("b", "d"),
        ("a", "d"),
        ("b", "c"),
        ("b", "f"),
        ("a", "g"),
        ("d", "g"),
        ("e", "b"),
        ("e", "f"),
        ("f", "g"),
        ("g", "c"),
    ])
    .expect("valid fixture")
}

/// A full shelling of [`caterpillar7_lasso`], each cord with its pivots.
pub fn caterpillar7_shelling() -> Vec<ShellingStep> {
    [
        ("b", "g", "a", "d"),
        ("c", "d", "b", "g"),
        ("a", "c", "b", "d"),
        ("c", "f", "b", "g"),
        ("c", "e", "b", "f"),
        ("a", "f", "b", "g"),
        ("d", "f", "b", "g"),
        ("a", "e", "b", "f"),
        ("e", "g", "a", "f"),
        ("e", "d", "b", "f"),
    ]
    .iter()
    .map(|&(a, b, x, y)| ShellingStep {
        cord: Cord::parse(a, b).expect("valid fixture"),
        pivots: (Taxon::new(x).expect("valid"), Taxon::new(y).expect("valid")),
    })
    .collect()
}

/// A 2d-tree ordering of [`caterpillar7_lasso`].
pub fn caterpillar7_2d_order() -> Vec<Taxon> {
    taxa(&["a", "b", "d", "g", "c", "f", "e"])
}

pub const THREE_CHERRIES_NEWICK: &str = "((a,a'),(b,b'),(c,c'));";

/// Three cherries `{a,a'}`, `{b,b'}`, `{c,c'}` around one vertex, unit
/// weights.
pub fn three_cherries() -> XTree {
    parse_newick(THREE_CHERRIES_NEWICK).expect("valid fixture")
}

/// `(cluster, image)` pairs of the stable transversal of [`three_cherries`]
/// whose triplet cover is [`three_cherries_cover`]. Each cherry maps to
/// its unprimed taxon and each complement of a cherry to the next cherry
/// round (`a -> b -> c -> a`); complements of single taxa follow the
/// complement of their cherry.
pub const THREE_CHERRIES_ASSIGNMENT: &[(&[&str], &str)] = &[
    (&["a"], "a"),
    (&["a'"], "a'"),
    (&["b"], "b"),
    (&["b'"], "b'"),
    (&["c"], "c"),
    (&["c'"], "c'"),
    (&["a", "a'"], "a"),
    (&["b", "b'"], "b"),
    (&["c", "c'"], "c"),
    (&["b", "b'", "c", "c'"], "b"),
    (&["a", "a'", "c", "c'"], "c"),
    (&["a", "a'", "b", "b'"], "a"),
    (&["a'", "b", "b'", "c", "c'"], "b"),
    (&["a", "b", "b'", "c", "c'"], "b"),
    (&["a", "a'", "b'", "c", "c'"], "c"),
    (&["a", "a'", "b", "c", "c'"], "c"),
    (&["a", "a'", "b", "b'", "c'"], "a"),
    (&["a", "a'", "b", "b'", "c"], "a"),
];

pub fn three_cherries_transversal(tree: &XTree) -> Transversal {
    let mut f = Transversal::new();
    for (cluster, image) in THREE_CHERRIES_ASSIGNMENT {
        f.set_labels(tree, cluster, image).expect("valid fixture");
    }
    f
}

/// The nine cords generated by [`three_cherries_transversal`].
pub fn three_cherries_cover() -> CordSet {
    CordSet::from_pairs(&[
        ("a", "b"),
        ("a", "c"),
        ("b", "c"),
        ("a", "a'"),
        ("a'", "b"),
        ("b", "b'"),
        ("b'", "c"),
        ("c", "c'"),
        ("c'", "a"),
    ])
    .expect("valid fixture")
}

pub fn three_cherries_2d_order() -> Vec<Taxon> {
    taxa(&["a", "b", "c", "a'", "b'", "c'"])
}

/// The quartet `ab||cd` with unit weights.
pub fn quartet() -> XTree {
    parse_newick("((a,b),(c,d));").expect("valid fixture")
}

/// Five cords on `{a,b,c,d}` that form a 2d-tree but leave `cd` open, so
/// they are not a strong lasso of [`quartet`].
pub fn quartet_2dtree_cords() -> CordSet {
    CordSet::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("a", "d"), ("b", "d")])
        .expect("valid fixture")
}
