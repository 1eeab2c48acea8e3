//! Cords (unordered taxon pairs), cord sets, and partial distance maps.
//!
//! Text formats, one record per line, `#` comments and blank lines ignored:
//!
//! * cord sets: `taxonA<TAB>taxonB`
//! * cord distances: `taxonA<TAB>taxonB<TAB>decimal`
//!
//! A line holding a single taxon declares that taxon without giving any
//! cord, which is how isolated taxa enter a file.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

use crate::numeric::{parse_decimal_exact, Distance, Tolerance};
use crate::tree::{Taxon, TreeError, XTree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CordError {
    #[error("cord joins taxon {0:?} to itself")]
    SelfCord(String),
    #[error("invalid taxon label {0:?}")]
    InvalidLabel(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: self-cord {taxon}-{taxon}")]
    SelfCordAt { line: usize, taxon: String },
    #[error("line {line}: negative distance {value}")]
    NegativeDistance { line: usize, value: String },
    #[error("line {line}: cord {cord} already has distance {first}, conflicting value {second}")]
    ConflictingDuplicate {
        line: usize,
        cord: Cord,
        first: String,
        second: String,
    },
    #[error("distance for cord {0} is negative")]
    Negative(Cord),
}

/// An unordered pair of distinct taxa, stored with the smaller label first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Cord {
    a: Taxon,
    b: Taxon,
}

impl Cord {
    pub fn new(x: Taxon, y: Taxon) -> Result<Self, CordError> {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Ok(Cord { a: x, b: y }),
            std::cmp::Ordering::Greater => Ok(Cord { a: y, b: x }),
            std::cmp::Ordering::Equal => Err(CordError::SelfCord(x.to_string())),
        }
    }

    pub fn parse(x: &str, y: &str) -> Result<Self, CordError> {
        let t = |s: &str| Taxon::new(s).map_err(|_| CordError::InvalidLabel(s.to_string()));
        Cord::new(t(x)?, t(y)?)
    }

    pub fn first(&self) -> &Taxon {
        &self.a
    }

    pub fn second(&self) -> &Taxon {
        &self.b
    }

    pub fn contains(&self, taxon: &str) -> bool {
        self.a.as_str() == taxon || self.b.as_str() == taxon
    }
}

impl fmt::Display for Cord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.a, self.b)
    }
}

/// A set of cords over an explicit taxon set `X` (the vertex set of the
/// graph `(X, L)`); `X` always contains every cord endpoint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CordSet {
    cords: BTreeSet<Cord>,
    taxa: BTreeSet<Taxon>,
}

impl CordSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_taxa<'a>(mut self, taxa: impl IntoIterator<Item = &'a Taxon>) -> Self {
        self.taxa.extend(taxa.into_iter().cloned());
        self
    }

    /// Every cord on `taxa`.
    pub fn complete<'a>(taxa: impl IntoIterator<Item = &'a Taxon>) -> Self {
        let taxa: Vec<&Taxon> = taxa.into_iter().collect();
        let mut set = CordSet::new().with_taxa(taxa.iter().copied());
        for (i, x) in taxa.iter().enumerate() {
            for y in &taxa[i + 1..] {
                set.insert(Cord::new((*x).clone(), (*y).clone()).expect("distinct taxa"));
            }
        }
        set
    }

    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self, CordError> {
        let mut set = CordSet::new();
        for &(x, y) in pairs {
            set.insert(Cord::parse(x, y)?);
        }
        Ok(set)
    }

    pub fn insert(&mut self, cord: Cord) -> bool {
        self.taxa.insert(cord.a.clone());
        self.taxa.insert(cord.b.clone());
        self.cords.insert(cord)
    }

    pub fn remove(&mut self, cord: &Cord) -> bool {
        self.cords.remove(cord)
    }

    pub fn contains(&self, cord: &Cord) -> bool {
        self.cords.contains(cord)
    }

    pub fn contains_pair(&self, x: &str, y: &str) -> bool {
        Cord::parse(x, y).is_ok_and(|c| self.cords.contains(&c))
    }

    pub fn len(&self) -> usize {
        self.cords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cords.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Cord> {
        self.cords.iter()
    }

    pub fn taxa(&self) -> &BTreeSet<Taxon> {
        &self.taxa
    }

    /// Cords whose endpoints are both taxa of `tree`, as index pairs.
    pub(crate) fn index_pairs(&self, tree: &XTree) -> Result<Vec<(usize, usize)>, TreeError> {
        self.cords
            .iter()
            .map(|c| Ok((tree.index_of(c.a.as_str())?, tree.index_of(c.b.as_str())?)))
            .collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for c in &self.cords {
            out.push_str(&format!("{}\t{}\n", c.a, c.b));
        }
        out
    }

    /// Reads `taxonA<TAB>taxonB` lines. A trailing third column is ignored,
    /// so a distance file can be read as its cord set.
    pub fn parse(text: &str) -> Result<Self, CordError> {
        let mut set = CordSet::new();
        for (line, fields) in records(text) {
            match fields.as_slice() {
                [x] => {
                    set.taxa.insert(taxon_at(line, x)?);
                }
                [x, y] | [x, y, _] => {
                    let cord = cord_at(line, x, y)?;
                    set.insert(cord);
                }
                _ => return Err(malformed(line, "expected two taxa")),
            }
        }
        Ok(set)
    }
}

impl<'a> IntoIterator for &'a CordSet {
    type Item = &'a Cord;
    type IntoIter = std::collections::btree_set::Iter<'a, Cord>;

    fn into_iter(self) -> Self::IntoIter {
        self.cords.iter()
    }
}

impl FromIterator<Cord> for CordSet {
    fn from_iter<I: IntoIterator<Item = Cord>>(iter: I) -> Self {
        let mut set = CordSet::new();
        for c in iter {
            set.insert(c);
        }
        set
    }
}

/// Distances known on a subset of cords: the restriction `d|L`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialDistance<V = f64> {
    entries: BTreeMap<Cord, V>,
    taxa: BTreeSet<Taxon>,
}

impl<V> Default for PartialDistance<V> {
    fn default() -> Self {
        PartialDistance {
            entries: BTreeMap::new(),
            taxa: BTreeSet::new(),
        }
    }
}

impl<V: Distance> PartialDistance<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_taxa<'a>(mut self, taxa: impl IntoIterator<Item = &'a Taxon>) -> Self {
        self.taxa.extend(taxa.into_iter().cloned());
        self
    }

    /// Sets a distance, replacing any previous value.
    pub fn insert(&mut self, cord: Cord, value: V) -> Result<(), CordError> {
        if value.is_negative() {
            return Err(CordError::Negative(cord));
        }
        self.taxa.insert(cord.a.clone());
        self.taxa.insert(cord.b.clone());
        self.entries.insert(cord, value);
        Ok(())
    }

    pub fn get(&self, x: &str, y: &str) -> Option<&V> {
        Cord::parse(x, y).ok().and_then(|c| self.entries.get(&c))
    }

    pub fn get_cord(&self, cord: &Cord) -> Option<&V> {
        self.entries.get(cord)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Cord, &V)> {
        self.entries.iter()
    }

    pub fn taxa(&self) -> &BTreeSet<Taxon> {
        &self.taxa
    }

    pub fn cords(&self) -> CordSet {
        self.entries.keys().cloned().collect::<CordSet>().with_taxa(&self.taxa)
    }

    /// Cords on the taxon set that carry no distance, in order.
    pub fn missing(&self) -> Vec<Cord> {
        CordSet::complete(&self.taxa)
            .iter()
            .filter(|c| !self.entries.contains_key(*c))
            .cloned()
            .collect()
    }

    pub fn is_total(&self) -> bool {
        let n = self.taxa.len();
        self.entries.len() == n * n.saturating_sub(1) / 2
    }

    /// Keeps only the entries on `cords`.
    pub fn restricted_to(&self, cords: &CordSet) -> Self {
        PartialDistance {
            entries: self
                .entries
                .iter()
                .filter(|(c, _)| cords.contains(c))
                .map(|(c, v)| (c.clone(), v.clone()))
                .collect(),
            taxa: self.taxa.clone(),
        }
    }

    pub fn to_f64(&self) -> PartialDistance<f64> {
        PartialDistance {
            entries: self.entries.iter().map(|(c, v)| (c.clone(), v.to_f64())).collect(),
            taxa: self.taxa.clone(),
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (c, v) in &self.entries {
            out.push_str(&format!("{}\t{}\t{}\n", c.a, c.b, v));
        }
        out
    }
}

impl PartialDistance<f64> {
    /// The same entries as exact rationals.
    pub fn to_exact(&self) -> PartialDistance<BigRational> {
        PartialDistance {
            entries: self
                .entries
                .iter()
                .map(|(c, v)| (c.clone(), BigRational::from_float(*v).expect("finite distance")))
                .collect(),
            taxa: self.taxa.clone(),
        }
    }
}

/// Reads a cord-distance file into floats. Repeated cords must agree
/// within `tol`.
pub fn parse_cord_distances(text: &str, tol: &Tolerance) -> Result<PartialDistance<f64>, CordError> {
    parse_with(text, tol, |s| {
        s.parse::<f64>().ok().filter(|v| v.is_finite())
    })
}

/// Reads a cord-distance file into exact rationals (decimal literals only).
pub fn parse_cord_distances_exact(text: &str) -> Result<PartialDistance<BigRational>, CordError> {
    parse_with(text, &Tolerance::new(0.0), parse_decimal_exact)
}

fn parse_with<V: Distance>(
    text: &str,
    tol: &Tolerance,
    parse_value: impl Fn(&str) -> Option<V>,
) -> Result<PartialDistance<V>, CordError> {
    let mut out: PartialDistance<V> = PartialDistance::new();
    for (line, fields) in records(text) {
        match fields.as_slice() {
            [x] => {
                out.taxa.insert(taxon_at(line, x)?);
            }
            [x, y, value] => {
                let cord = cord_at(line, x, y)?;
                let v = parse_value(value)
                    .ok_or_else(|| malformed(line, format!("invalid distance {value:?}")))?;
                if v.is_negative() {
                    return Err(CordError::NegativeDistance {
                        line,
                        value: value.to_string(),
                    });
                }
                if let Some(prev) = out.entries.get(&cord) {
                    if !prev.approx_eq(&v, tol) {
                        return Err(CordError::ConflictingDuplicate {
                            line,
                            first: prev.to_string(),
                            second: v.to_string(),
                            cord,
                        });
                    }
                    continue;
                }
                out.insert(cord, v)?;
            }
            _ => return Err(malformed(line, "expected taxonA<TAB>taxonB<TAB>distance")),
        }
    }
    Ok(out)
}

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line.split_whitespace().collect()))
        }
    })
}

fn malformed(line: usize, message: impl Into<String>) -> CordError {
    CordError::Malformed {
        line,
        message: message.into(),
    }
}

fn taxon_at(line: usize, label: &str) -> Result<Taxon, CordError> {
    Taxon::new(label).map_err(|_| malformed(line, format!("invalid taxon label {label:?}")))
}

fn cord_at(line: usize, x: &str, y: &str) -> Result<Cord, CordError> {
    let (x, y) = (taxon_at(line, x)?, taxon_at(line, y)?);
    if x == y {
        return Err(CordError::SelfCordAt {
            line,
            taxon: x.to_string(),
        });
    }
    Ok(Cord::new(x, y).expect("distinct"))
}

/// `d_(T,w)` restricted to `cords`; the taxon set is the tree's.
pub fn induced_distance(tree: &XTree, cords: &CordSet) -> Result<PartialDistance<f64>, TreeError> {
    let n = tree.n_taxa();
    for t in cords.taxa() {
        tree.index_of(t.as_str())?;
    }
    let dist = tree.distance_matrix();
    let mut out: PartialDistance<f64> = PartialDistance::new().with_taxa(tree.taxa());
    for (cord, (i, j)) in cords.iter().zip(cords.index_pairs(tree)?) {
        out.entries.insert(cord.clone(), dist[i * n + j]);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphChecks {
    pub connected: bool,
    pub all_components_non_bipartite: bool,
}

/// Connectivity and per-component non-bipartiteness of `(X, L)`, where the
/// vertex set is `taxa` together with every cord endpoint.
pub fn graph_necessary_checks<'a>(
    cords: &CordSet,
    taxa: impl IntoIterator<Item = &'a Taxon>,
) -> GraphChecks {
    let vertices: Vec<&Taxon> = {
        let mut all: BTreeSet<&Taxon> = taxa.into_iter().collect();
        all.extend(cords.taxa());
        all.into_iter().collect()
    };
    let index = |t: &Taxon| vertices.binary_search(&t).unwrap();
    let mut adj = vec![Vec::new(); vertices.len()];
    for c in cords {
        let (i, j) = (index(&c.a), index(&c.b));
        adj[i].push(j);
        adj[j].push(i);
    }

    let mut color: Vec<Option<bool>> = vec![None; vertices.len()];
    let mut components = 0;
    let mut all_odd = true;
    for start in 0..vertices.len() {
        if color[start].is_some() {
            continue;
        }
        components += 1;
        let mut bipartite = true;
        color[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let cv = color[v].unwrap();
            for &u in &adj[v] {
                match color[u] {
                    None => {
                        color[u] = Some(!cv);
                        queue.push_back(u);
                    }
                    Some(cu) if cu == cv => bipartite = false,
                    _ => {}
                }
            }
        }
        all_odd &= !bipartite;
    }
    GraphChecks {
        connected: components <= 1,
        all_components_non_bipartite: all_odd,
    }
}
