//! Rule (R) and its fixpoint `cl_R`.
//!
//! For taxa `x, y, u, z` with `xz` unknown and the other five cords known,
//! if `d(x,y) + d(u,z) < d(x,u) + d(y,z)` then the quartet is `xy||uz` and
//! `d(x,z) = d(x,u) + d(y,z) - d(y,u)`. The rule needs only distances.
//!
//! The scan is deterministic: absent cords in lexicographic order, and for
//! each one the pairs `{s,t}` of remaining taxa in lexicographic order.
//! A derived cord is added at once and later cords in the same pass may
//! use it. When a cord is derived, every derivation available at that
//! moment is computed and they must agree.

use std::fmt;

use thiserror::Error;

use crate::cords::{Cord, PartialDistance};
use crate::numeric::{Distance, Tolerance};
use crate::tree::Taxon;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosureError {
    #[error("no distances given")]
    Empty,
    #[error("cord {cord} derived as both {first} and {second}; input is not a tree metric")]
    Inconsistent {
        cord: Cord,
        first: String,
        second: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureStep<V = f64> {
    pub cord: Cord,
    /// `(x, y, u, z)` with `cord = xz`.
    pub quadruple: [Taxon; 4],
    pub value: V,
}

impl<V: fmt::Display> fmt::Display for ClosureStep<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, u, z] = &self.quadruple;
        write!(
            f,
            "{x} {z} := d({x},{u})+d({y},{z})-d({y},{u}) via ({x},{y},{u},{z}) = {}",
            self.value
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureTrace<V = f64> {
    pub steps: Vec<ClosureStep<V>>,
    pub result: PartialDistance<V>,
}

impl<V: Distance> ClosureTrace<V> {
    /// The fixpoint covers every cord on the taxon set.
    pub fn is_complete(&self) -> bool {
        self.result.is_total()
    }

    pub fn missing(&self) -> Vec<Cord> {
        self.result.missing()
    }

    /// One step per line.
    pub fn to_text(&self) -> String {
        self.steps.iter().map(|s| format!("{s}\n")).collect()
    }
}

/// Runs rule (R) to its fixpoint.
pub fn closure<V: Distance>(
    d: &PartialDistance<V>,
    tol: &Tolerance,
) -> Result<ClosureTrace<V>, ClosureError> {
    if d.is_empty() {
        return Err(ClosureError::Empty);
    }
    let taxa: Vec<Taxon> = d.taxa().iter().cloned().collect();
    let n = taxa.len();
    let idx = |t: &Taxon| taxa.binary_search(t).expect("cord taxa are in the taxon set");
    let mut m: Vec<Option<V>> = vec![None; n * n];
    for (cord, v) in d.iter() {
        let (i, j) = (idx(cord.first()), idx(cord.second()));
        m[i * n + j] = Some(v.clone());
        m[j * n + i] = Some(v.clone());
    }

    let mut steps = Vec::new();
    let mut result = d.clone();
    loop {
        let mut changed = false;
        for p in 0..n {
            for q in p + 1..n {
                if m[p * n + q].is_some() {
                    continue;
                }
                let Some((value, quadruple)) = derive(&m, n, p, q, tol, &taxa)? else {
                    continue;
                };
                m[p * n + q] = Some(value.clone());
                m[q * n + p] = Some(value.clone());
                let cord = Cord::new(taxa[p].clone(), taxa[q].clone()).expect("p < q");
                result
                    .insert(cord.clone(), value.clone())
                    .expect("derived values of a metric are non-negative");
                steps.push(ClosureStep {
                    cord,
                    quadruple: quadruple.map(|i| taxa[i].clone()),
                    value,
                });
                changed = true;
            }
        }
        if !changed {
            return Ok(ClosureTrace { steps, result });
        }
    }
}

/// Every rule-(R) derivation of `pq`; the first is returned and the rest
/// must agree with it.
fn derive<V: Distance>(
    m: &[Option<V>],
    n: usize,
    p: usize,
    q: usize,
    tol: &Tolerance,
    taxa: &[Taxon],
) -> Result<Option<(V, [usize; 4])>, ClosureError> {
    let get = |i: usize, j: usize| m[i * n + j].as_ref();
    let mut found: Option<(V, [usize; 4])> = None;
    for s in 0..n {
        if s == p || s == q {
            continue;
        }
        let (Some(ps), Some(qs)) = (get(p, s), get(q, s)) else {
            continue;
        };
        for t in s + 1..n {
            if t == p || t == q {
                continue;
            }
            let (Some(pt), Some(qt), Some(st)) = (get(p, t), get(q, t), get(s, t)) else {
                continue;
            };
            let a = ps.clone() + qt.clone();
            let b = pt.clone() + qs.clone();
            let candidate = if a.clearly_less(&b, tol) {
                // x=p, y=s, u=t, z=q
                Some((b - st.clone(), [p, s, t, q]))
            } else if b.clearly_less(&a, tol) {
                Some((a - st.clone(), [p, t, s, q]))
            } else {
                None
            };
            let Some((value, quad)) = candidate else {
                continue;
            };
            match &found {
                None => found = Some((value, quad)),
                Some((first, _)) => {
                    if !first.approx_eq(&value, tol) {
                        return Err(ClosureError::Inconsistent {
                            cord: Cord::new(taxa[p].clone(), taxa[q].clone()).expect("p < q"),
                            first: first.to_string(),
                            second: value.to_string(),
                        });
                    }
                }
            }
        }
    }
    if let Some((value, _)) = &found {
        if value.is_negative() && !value.approx_eq(&V::zero(), tol) {
            return Err(ClosureError::Inconsistent {
                cord: Cord::new(taxa[p].clone(), taxa[q].clone()).expect("p < q"),
                first: value.to_string(),
                second: "a non-negative distance".to_string(),
            });
        }
    }
    Ok(found.map(|(v, quad)| (if v.is_negative() { V::zero() } else { v }, quad)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cords::{induced_distance, parse_cord_distances, parse_cord_distances_exact, CordSet};
    use crate::newick::parse_newick;

    #[test]
    fn single_quartet_step() {
        let tol = Tolerance::default();
        let d = parse_cord_distances("x\ty\t2\nu\tz\t2\nu\tx\t3\nu\ty\t3\ny\tz\t3\n", &tol).unwrap();
        let trace = closure(&d, &tol).unwrap();
        assert_eq!(trace.steps.len(), 1);
        let step = &trace.steps[0];
        assert_eq!(step.cord, Cord::parse("x", "z").unwrap());
        assert_eq!(step.value, 3.0);
        assert!(trace.is_complete());
        assert_eq!(
            trace.to_text(),
            "x z := d(x,u)+d(y,z)-d(y,u) via (x,y,u,z) = 3\n"
        );
    }

    #[test]
    fn total_input_needs_no_steps() {
        let t = parse_newick("((a:1,b:2):3,(c:4,d:5):6,e:7);").unwrap();
        let d = induced_distance(&t, &CordSet::complete(t.taxa())).unwrap();
        let trace = closure(&d, &Tolerance::default()).unwrap();
        assert!(trace.steps.is_empty());
        assert!(trace.is_complete());
    }

    #[test]
    fn three_taxa_cannot_close() {
        let tol = Tolerance::default();
        let d = parse_cord_distances("a\tb\t2\nc\n", &tol).unwrap();
        let trace = closure(&d, &tol).unwrap();
        assert!(!trace.is_complete());
        let missing: Vec<String> = trace.missing().iter().map(|c| c.to_string()).collect();
        assert_eq!(missing, vec!["a c", "b c"]);
        assert_eq!(closure(&PartialDistance::<f64>::new(), &tol), Err(ClosureError::Empty));
    }

    #[test]
    fn star_quartet_derives_nothing() {
        // Every sum ties on a star, so no quartet is identified.
        let tol = Tolerance::default();
        let d = parse_cord_distances("a\tb\t2\na\tc\t2\na\td\t2\nb\tc\t2\nb\td\t2\n", &tol).unwrap();
        let trace = closure(&d, &tol).unwrap();
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn conflicting_derivations_are_reported() {
        // On five taxa, cord ae is derivable through {b,c}, {b,d} and {c,d};
        // the distances below are not a tree metric and disagree.
        let tol = Tolerance::default();
        let text = "a\tb\t1\na\tc\t5\na\td\t5\nb\tc\t5\nb\td\t5\nc\td\t1\n\
                    b\te\t5\nc\te\t1\nd\te\t3\n";
        let d = parse_cord_distances(text, &tol).unwrap();
        assert!(matches!(closure(&d, &tol), Err(ClosureError::Inconsistent { .. })));
    }

    #[test]
    fn exact_mode_matches_float_mode() {
        let text = "x\ty\t0.1\nu\tz\t0.2\nu\tx\t0.7\nu\ty\t0.6\ny\tz\t0.5\n";
        let exact = closure(&parse_cord_distances_exact(text).unwrap(), &Tolerance::default()).unwrap();
        assert_eq!(exact.steps.len(), 1);
        assert_eq!(exact.steps[0].value.to_string(), "3/5");
    }
}
