//! Acceptance criteria 1-9, run without the test harness so each prints
//! one PASS/FAIL line. Exits non-zero if any criterion fails.

use std::time::Instant;

use lasso_core::fixtures::*;
use lasso_core::lasso::*;
use lasso_core::random::{default_labels, random_order, random_tree_with_rng};
use lasso_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unit_distances() -> Outcome {
    let t = caterpillar7();
    let got = [("a", "b"), ("c", "e"), ("c", "f")].map(|(x, y)| t.path_distance(x, y).unwrap());
    ensure(got == [2.0, 4.0, 5.0], || format!("got {got:?}"))?;
    Ok("d(a,b)=2 d(c,e)=4 d(c,f)=5".into())
}

fn three_cherry_cover() -> Outcome {
    let t = three_cherries();
    let f = three_cherries_transversal(&t);
    let l = triplet_cover(&t, &f, false).map_err(|e| e.to_string())?;
    ensure(l == three_cherries_cover(), || format!("got {}", l.to_tsv().replace('\n', " ")))?;
    ensure(l.len() == 2 * 6 - 3, || format!("size {}", l.len()))?;
    Ok("exact set, 9 cords".into())
}

fn two_d_fixtures() -> Outcome {
    for (name, cords, order) in [
        ("three cherries", three_cherries_cover(), three_cherries_2d_order()),
        ("caterpillar", caterpillar7_lasso(), caterpillar7_2d_order()),
    ] {
        ensure(is_2dtree(&cords).is_some(), || format!("{name}: not recognised"))?;
        validate_2dtree_ordering(&cords, &order).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok("both graphs recognised, both orderings validate".into())
}

fn caterpillar_shelling() -> Outcome {
    let t = caterpillar7();
    let l = caterpillar7_lasso();
    let found = is_shellable(&t, &l).map_err(|e| e.to_string())?;
    ensure(found.is_shellable(), || "greedy shelling stalled".into())?;
    validate_shelling(&t, &l, &caterpillar7_shelling())
        .map_err(|e| e.to_string())?
        .map_err(|v| format!("listed shelling rejected: {v:?}"))?;
    Ok("shellable; listed 10-step trace validates".into())
}

fn reweighted_recovery(tree: &XTree, cords: &CordSet, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let truth = tree.reweighted(|_| rng.gen_range(0.1..10.0)).unwrap();
    let d = induced_distance(&truth, cords).unwrap();
    let r = reconstruct(&d, &Tolerance::default()).map_err(|e| e.to_string())?;
    let rebuilt = r.tree().ok_or("closure incomplete")?;
    ensure(rebuilt.is_equivalent(&truth).unwrap(), || "wrong topology".into())?;
    let err = rebuilt.max_weight_difference(&truth).unwrap().unwrap();
    ensure(err <= 1e-6, || format!("weight error {err}"))
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (tree, cords) in [
        (caterpillar7(), caterpillar7_lasso()),
        (three_cherries(), three_cherries_cover()),
    ] {
        for i in 0..20 {
            reweighted_recovery(&tree, &cords, &mut rng).map_err(|e| format!("weighting {i}: {e}"))?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.3}s"))?;
    Ok(format!("40/40 recovered in {secs:.3}s"))
}

fn two_d_not_strong() -> Outcome {
    let t = quartet();
    let l = quartet_2dtree_cords();
    let order = is_2dtree(&l).ok_or("not recognised as a 2d-tree")?;
    let verdict = topological_lasso_oracle(&t, &l).map_err(|e| e.to_string())?;
    ensure(verdict.is_refuted(), || "oracle did not refute".into())?;
    let built = tree_from_2dtree(&l, &order).map_err(|e| e.to_string())?;
    ensure(built.is_fully_resolved(), || "built tree not fully resolved".into())?;
    let d = induced_distance(&built, &l).unwrap();
    let trace = closure(&d, &Tolerance::default()).map_err(|e| e.to_string())?;
    ensure(trace.is_complete(), || "closure incomplete on built tree".into())?;
    Ok(format!("refuted on ab||cd; built tree {} closes to 6 cords", write_newick(&built)))
}

fn cover_properties() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rules = [TransversalRule::Min, TransversalRule::Closest, TransversalRule::Furthest];
    let mut covers = 0;
    for trial in 0..500 {
        let n = rng.gen_range(4..=12);
        let t = random_tree_with_rng(&default_labels(n), &mut rng, (0.1, 10.0)).unwrap();
        let order = random_order(&t, &mut rng);
        // Min and closest every trial, furthest on alternate trials.
        let used = if trial % 2 == 0 { &rules[..] } else { &rules[..2] };
        for &rule in used {
            let ctx = |what: &str| format!("trial {trial} n={n} {rule:?}: {what}");
            let f = transversal_by_rule(&t, rule, &order).map_err(|e| ctx(&e.to_string()))?;
            let l = triplet_cover(&t, &f, false).map_err(|e| ctx(&e.to_string()))?;
            ensure(l.len() == 2 * n - 3, || ctx(&format!("size {}", l.len())))?;
            ensure(is_triplet_cover(&t, &l).unwrap(), || ctx("not a triplet cover"))?;
            ensure(is_shellable(&t, &l).unwrap().is_shellable(), || ctx("not shellable"))?;
            ensure(is_2dtree(&l).is_some(), || ctx("not a 2d-tree"))?;
            ensure(edge_weight_lasso_certificate(&t, &l).unwrap(), || ctx("rank deficient"))?;
            for c in &l {
                let mut smaller = l.clone();
                smaller.remove(c);
                ensure(!edge_weight_lasso_certificate(&t, &smaller).unwrap(), || {
                    ctx(&format!("still full rank without {c}"))
                })?;
            }
            covers += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1}s"))?;
    Ok(format!("500 trials, {covers} covers, {secs:.2}s"))
}

fn closure_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let tol = Tolerance::default();
    let mut derived = 0;
    for trial in 0..200 {
        let n = rng.gen_range(4..=12);
        let t = random_tree_with_rng(&default_labels(n), &mut rng, (0.1, 10.0)).unwrap();
        // Alternate between stable covers, covers with extras, and random
        // cord subsets (which may stall but must never derive wrongly).
        let l = match trial % 3 {
            0 | 1 => {
                let order = random_order(&t, &mut rng);
                let mut l = triplet_cover(&t, &min_order_transversal(&t, &order).unwrap(), false).unwrap();
                if trial % 3 == 1 {
                    for c in &CordSet::complete(t.taxa()) {
                        if rng.gen_bool(0.2) {
                            l.insert(c.clone());
                        }
                    }
                }
                l
            }
            _ => CordSet::complete(t.taxa())
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect(),
        };
        let d = induced_distance(&t, &l).unwrap();
        let trace = closure(&d, &tol).map_err(|e| format!("trial {trial}: {e}"))?;
        for step in &trace.steps {
            let truth = t
                .path_distance(step.cord.first().as_str(), step.cord.second().as_str())
                .unwrap();
            ensure((step.value - truth).abs() <= 1e-9, || {
                format!("trial {trial}: {} derived {} but path gives {truth}", step.cord, step.value)
            })?;
            derived += 1;
        }
    }
    Ok(format!("200 trials, {derived} derived values all exact"))
}

fn nj_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let tol = Tolerance::default();
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let n = rng.gen_range(3..=14);
        let t = random_tree_with_rng(&default_labels(n), &mut rng, (0.1, 10.0)).unwrap();
        let d = induced_distance(&t, &CordSet::complete(t.taxa())).unwrap();
        let rebuilt = neighbor_joining(&d, &tol).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(rebuilt.is_equivalent(&t).unwrap(), || format!("trial {trial}: wrong topology"))?;
        let err = rebuilt.max_weight_difference(&t).unwrap().unwrap();
        ensure(err <= 1e-6, || format!("trial {trial}: weight error {err}"))?;
        worst = worst.max(err);
    }
    Ok(format!("200 trials, worst weight error {worst:.2e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("unit-weight caterpillar distances", unit_distances),
        ("three-cherry stable triplet cover", three_cherry_cover),
        ("2d-tree fixtures", two_d_fixtures),
        ("caterpillar lasso shelling", caterpillar_shelling),
        ("end-to-end reconstruction", end_to_end),
        ("2d-tree that is not a strong lasso", two_d_not_strong),
        ("stable triplet cover properties", cover_properties),
        ("closure soundness", closure_soundness),
        ("neighbor-joining exactness", nj_exactness),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
