//! Shellability by greedy saturation.
//!
//! A cord `ab` outside the current set `L_µ` is admissible when there are
//! pivots `x, y` such that `T|{a,b,x,y}` is `ax||yb` and the other five
//! cords on `{a,b,x,y}` are in `L_µ`. Admissibility only depends on which
//! cords are present, and adding cords never removes a witness, so a cord
//! admissible once stays admissible. The cords reachable by some shelling
//! therefore form a closure, and any maximal greedy run reaches all of it:
//! `L` is shellable exactly when greedy saturation reaches every cord.
//!
//! Pivot order is not significant: `ax||yb` and `ay||xb` both separate
//! `a` from `b` and both are accepted. Traces report pivots oriented so
//! that the first one sits with `a`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cords::{Cord, CordSet};
use crate::tree::{quartet_pairing, Taxon, TreeError, XTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShellingStep {
    pub cord: Cord,
    pub pivots: (Taxon, Taxon),
}

impl fmt::Display for ShellingStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} | pivots {} {}",
            self.cord.first(),
            self.cord.second(),
            self.pivots.0,
            self.pivots.1
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShellingTrace {
    pub steps: Vec<ShellingStep>,
}

impl ShellingTrace {
    pub fn to_text(&self) -> String {
        self.steps.iter().map(|s| format!("{s}\n")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shelling {
    Shellable(ShellingTrace),
    /// Saturation stopped with `missing` cords unreachable.
    NotShellable {
        partial: ShellingTrace,
        missing: Vec<Cord>,
    },
}

impl Shelling {
    pub fn is_shellable(&self) -> bool {
        matches!(self, Shelling::Shellable(_))
    }
}

struct Saturation<'a> {
    tree: &'a XTree,
    n: usize,
    hops: Vec<u32>,
    present: Vec<bool>,
}

impl<'a> Saturation<'a> {
    fn new(tree: &'a XTree, cords: &CordSet) -> Result<Self, TreeError> {
        tree.require_fully_resolved()?;
        let n = tree.n_taxa();
        let mut present = vec![false; n * n];
        for (i, j) in cords.index_pairs(tree)? {
            present[i * n + j] = true;
            present[j * n + i] = true;
        }
        Ok(Saturation {
            tree,
            n,
            hops: tree.hop_matrix(),
            present,
        })
    }

    fn has(&self, i: usize, j: usize) -> bool {
        self.present[i * self.n + j]
    }

    /// Pivot `x` paired with `a` and `y` paired with `b`, if `{x,y}` works.
    fn orient(&self, a: usize, b: usize, x: usize, y: usize) -> Option<(usize, usize)> {
        let others = [(a, x), (a, y), (b, x), (b, y), (x, y)];
        if !others.iter().all(|&(i, j)| self.has(i, j)) {
            return None;
        }
        match quartet_pairing(&self.hops, self.n, [a, b, x, y]) {
            Some(1) => Some((x, y)), // ax||by
            Some(2) => Some((y, x)), // ay||bx
            _ => None,
        }
    }

    fn pivots(&self, a: usize, b: usize, candidates: &[usize]) -> Option<(usize, usize)> {
        for (k, &x) in candidates.iter().enumerate() {
            if x == a || x == b || !self.has(a, x) || !self.has(b, x) {
                continue;
            }
            for &y in &candidates[k + 1..] {
                if y == a || y == b {
                    continue;
                }
                if let Some(p) = self.orient(a, b, x, y) {
                    return Some(p);
                }
            }
        }
        None
    }

    fn run(mut self, mut shuffle: impl FnMut(&mut Vec<(usize, usize)>, &mut Vec<usize>)) -> Shelling {
        let n = self.n;
        let taxa = self.tree.taxa();
        let mut absent: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.has(i, j))
            .collect();
        let mut candidates: Vec<usize> = (0..n).collect();
        let mut trace = ShellingTrace::default();
        loop {
            shuffle(&mut absent, &mut candidates);
            let mut progressed = false;
            let mut still = Vec::with_capacity(absent.len());
            for &(a, b) in &absent {
                match self.pivots(a, b, &candidates) {
                    Some((x, y)) => {
                        self.present[a * n + b] = true;
                        self.present[b * n + a] = true;
                        trace.steps.push(ShellingStep {
                            cord: Cord::new(taxa[a].clone(), taxa[b].clone()).expect("a < b"),
                            pivots: (taxa[x].clone(), taxa[y].clone()),
                        });
                        progressed = true;
                    }
                    None => still.push((a, b)),
                }
            }
            absent = still;
            if absent.is_empty() {
                return Shelling::Shellable(trace);
            }
            if !progressed {
                let missing = absent
                    .iter()
                    .map(|&(a, b)| Cord::new(taxa[a].clone(), taxa[b].clone()).expect("a != b"))
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .collect();
                return Shelling::NotShellable {
                    partial: trace,
                    missing,
                };
            }
        }
    }
}

/// Greedy saturation with a lexicographic scan.
pub fn is_shellable(tree: &XTree, cords: &CordSet) -> Result<Shelling, TreeError> {
    Ok(Saturation::new(tree, cords)?.run(|_, _| {}))
}

/// Greedy saturation that reshuffles the cord and pivot scan order on every
/// pass. The verdict never depends on the order.
pub fn is_shellable_with_rng<R: Rng + ?Sized>(
    tree: &XTree,
    cords: &CordSet,
    rng: &mut R,
) -> Result<Shelling, TreeError> {
    Ok(Saturation::new(tree, cords)?.run(|absent, candidates| {
        absent.shuffle(rng);
        candidates.shuffle(rng);
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShellingViolation {
    /// Zero-based step index.
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for ShellingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step + 1, self.reason)
    }
}

/// Replays a proposed shelling step by step against `L`. Each step must add
/// a new cord whose pivots separate its ends on `tree` and whose other five
/// quartet cords are already known. The trace need not reach every cord.
pub fn validate_shelling(
    tree: &XTree,
    cords: &CordSet,
    steps: &[ShellingStep],
) -> Result<Result<(), ShellingViolation>, TreeError> {
    let mut state = Saturation::new(tree, cords)?;
    for (k, step) in steps.iter().enumerate() {
        let fail = |reason: String| Ok(Err(ShellingViolation { step: k, reason }));
        let a = tree.index_of(step.cord.first().as_str())?;
        let b = tree.index_of(step.cord.second().as_str())?;
        let x = tree.index_of(step.pivots.0.as_str())?;
        let y = tree.index_of(step.pivots.1.as_str())?;
        if state.has(a, b) {
            return fail(format!("cord {} is already present", step.cord));
        }
        let quad: std::collections::BTreeSet<_> = [a, b, x, y].into_iter().collect();
        if quad.len() != 4 {
            return fail("pivots must be two taxa outside the cord".into());
        }
        if state.orient(a, b, x, y).is_none() {
            return fail(format!(
                "pivots {} {} do not witness cord {}",
                step.pivots.0, step.pivots.1, step.cord
            ));
        }
        state.present[a * state.n + b] = true;
        state.present[b * state.n + a] = true;
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;
    use rand::SeedableRng;

    fn step(a: &str, b: &str, x: &str, y: &str) -> ShellingStep {
        ShellingStep {
            cord: Cord::parse(a, b).unwrap(),
            pivots: (Taxon::new(x).unwrap(), Taxon::new(y).unwrap()),
        }
    }

    #[test]
    fn quartet_with_one_missing_cord() {
        let t = parse_newick("((a,b),(c,d));").unwrap();
        let cords = CordSet::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("b", "d"), ("c", "d")]).unwrap();
        match is_shellable(&t, &cords).unwrap() {
            Shelling::Shellable(trace) => {
                assert_eq!(trace.steps, vec![step("a", "d", "b", "c")]);
                assert_eq!(trace.to_text(), "a d | pivots b c\n");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn five_cords_on_one_side_fail() {
        let t = parse_newick("((a,b),(c,d));").unwrap();
        let cords = CordSet::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("a", "d"), ("b", "d")]).unwrap();
        match is_shellable(&t, &cords).unwrap() {
            Shelling::NotShellable { partial, missing } => {
                assert!(partial.steps.is_empty());
                assert_eq!(missing, vec![Cord::parse("c", "d").unwrap()]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn complete_set_has_empty_trace() {
        let t = parse_newick("((a,b),c,(d,e));").unwrap();
        let all = CordSet::complete(t.taxa());
        assert_eq!(is_shellable(&t, &all).unwrap(), Shelling::Shellable(ShellingTrace::default()));
    }

    #[test]
    fn random_scan_agrees() {
        let t = parse_newick("((a,b),(c,d));").unwrap();
        let cords = CordSet::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("b", "d"), ("c", "d")]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert!(is_shellable_with_rng(&t, &cords, &mut rng).unwrap().is_shellable());
        }
    }

    #[test]
    fn validation_catches_bad_steps() {
        let t = parse_newick("((a,b),(c,d));").unwrap();
        let cords = CordSet::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("b", "d"), ("c", "d")]).unwrap();
        assert_eq!(validate_shelling(&t, &cords, &[step("a", "d", "c", "b")]).unwrap(), Ok(()));
        let err = validate_shelling(&t, &cords, &[step("a", "b", "c", "d")]).unwrap().unwrap_err();
        assert_eq!(err.step, 0);
        let err = validate_shelling(&t, &cords, &[step("a", "d", "b", "b")]).unwrap().unwrap_err();
        assert!(err.reason.contains("outside"));

        // Pivots a,b for cord cd pair across the quartet's own split.
        let t2 = parse_newick("((a,b),(c,d));").unwrap();
        let l2 = CordSet::from_pairs(&[("a", "b"), ("a", "c"), ("b", "c"), ("a", "d"), ("b", "d")]).unwrap();
        assert!(validate_shelling(&t2, &l2, &[step("c", "d", "a", "b")]).unwrap().is_err());
    }

    #[test]
    fn unresolved_tree_is_an_error() {
        let t = parse_newick("(a,b,c,d);").unwrap();
        assert_eq!(
            is_shellable(&t, &CordSet::new()).unwrap_err(),
            TreeError::NotFullyResolved
        );
    }
}
