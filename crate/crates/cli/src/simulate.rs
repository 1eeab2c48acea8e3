//! Seeded reconstruction campaigns. Trial `i` draws from its own ChaCha
//! stream of the master seed, so results do not depend on scheduling.

use std::time::Instant;

use anyhow::{bail, Result};
use clap::Args;
use lasso_core::random::{default_labels, random_order, random_tree_with_rng};
use lasso_core::{
    induced_distance, reconstruct, transversal_by_rule, triplet_cover, CordSet, Reconstruction, Tolerance,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{RuleArg, Status};

#[derive(Args)]
pub(crate) struct SimulateArgs {
    /// Taxa per tree.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge weights are drawn uniformly from `lo,hi`.
    #[arg(long, default_value = "0.1,10", value_parser = parse_range)]
    weight_range: (f64, f64),
    /// Probability of dropping each droppable cord.
    #[arg(long, default_value_t = 0.0)]
    dropout: f64,
    /// Random cords added on top of the cover.
    #[arg(long, default_value_t = 0)]
    extra: usize,
    /// Let --dropout remove cover cords too, not only the extras.
    #[arg(long)]
    drop_cover: bool,
    #[arg(long, value_enum, default_value = "min")]
    transversal: RuleArg,
    /// Put the mean wall time in the report (which then varies run to
    /// run) instead of on standard error.
    #[arg(long)]
    timing: bool,
}

fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(format!("need 0 < lo <= hi, got {lo},{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Recovered,
    Incomplete,
    Inconsistent,
    /// Reconstructed, but not the source tree.
    Wrong,
}

struct Trial {
    outcome: Outcome,
    cords: usize,
    closure_steps: Option<usize>,
    seconds: f64,
}

fn trial(a: &SimulateArgs, index: usize, tol: &Tolerance) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    rng.set_stream(index as u64);
    let tree = random_tree_with_rng(&default_labels(a.n), &mut rng, a.weight_range).expect("validated parameters");
    let order = random_order(&tree, &mut rng);
    let f = transversal_by_rule(&tree, a.transversal.into(), &order).expect("random trees are proper");
    let cover = triplet_cover(&tree, &f, false).expect("built-in transversals are stable");

    let others: Vec<_> = CordSet::complete(tree.taxa()).iter().filter(|c| !cover.contains(c)).cloned().collect();
    let extras: Vec<_> = others.choose_multiple(&mut rng, a.extra.min(others.len())).cloned().collect();
    let mut cords = CordSet::new().with_taxa(tree.taxa());
    for c in cover.iter() {
        if !(a.drop_cover && rng.gen_bool(a.dropout)) {
            cords.insert(c.clone());
        }
    }
    for c in extras {
        if !rng.gen_bool(a.dropout) {
            cords.insert(c);
        }
    }

    let d = induced_distance(&tree, &cords).expect("cords are on the tree's taxa");
    let start = Instant::now();
    let result = if d.is_empty() { None } else { Some(reconstruct(&d, tol)) };
    let seconds = start.elapsed().as_secs_f64();
    let (outcome, closure_steps) = match result {
        None => (Outcome::Incomplete, Some(0)),
        Some(Ok(Reconstruction::Complete { tree: rebuilt, closure })) => {
            let exact = rebuilt.is_equivalent(&tree).unwrap_or(false)
                && rebuilt
                    .max_weight_difference(&tree)
                    .ok()
                    .flatten()
                    .is_some_and(|e| e <= lasso_core::reconstruct::VERIFY_TOLERANCE);
            (if exact { Outcome::Recovered } else { Outcome::Wrong }, Some(closure.steps.len()))
        }
        Some(Ok(Reconstruction::Incomplete { closure, .. })) => (Outcome::Incomplete, Some(closure.steps.len())),
        Some(Err(_)) => (Outcome::Inconsistent, None),
    };
    Trial {
        outcome,
        cords: cords.len(),
        closure_steps,
        seconds,
    }
}

pub(crate) fn run(a: SimulateArgs, tol: &Tolerance) -> Result<Status> {
    if a.n < 3 {
        bail!("--n must be at least 3");
    }
    if a.trials == 0 {
        bail!("--trials must be at least 1");
    }
    if !(0.0..1.0).contains(&a.dropout) {
        bail!("--dropout must lie in [0, 1)");
    }

    let trials: Vec<Trial> = (0..a.trials).into_par_iter().map(|i| trial(&a, i, tol)).collect();
    let total = trials.len() as f64;
    let count = |o: Outcome| trials.iter().filter(|t| t.outcome == o).count();
    let rate = |o: Outcome| count(o) as f64 / total;
    let closed: Vec<usize> = trials.iter().filter_map(|t| t.closure_steps).collect();
    let mean_steps = if closed.is_empty() {
        0.0
    } else {
        closed.iter().sum::<usize>() as f64 / closed.len() as f64
    };
    let mean_cords = trials.iter().map(|t| t.cords).sum::<usize>() as f64 / total;
    let mean_ms = trials.iter().map(|t| t.seconds).sum::<f64>() / total * 1e3;

    let mut header = vec![
        "n", "trials", "seed", "dropout", "extra", "drop_cover", "success_rate", "incomplete_rate",
        "inconsistent_rate", "wrong_rate", "mean_cords", "mean_closure_steps",
    ];
    let mut row = vec![
        a.n.to_string(),
        a.trials.to_string(),
        a.seed.to_string(),
        a.dropout.to_string(),
        a.extra.to_string(),
        a.drop_cover.to_string(),
        format!("{:.4}", rate(Outcome::Recovered)),
        format!("{:.4}", rate(Outcome::Incomplete)),
        format!("{:.4}", rate(Outcome::Inconsistent)),
        format!("{:.4}", rate(Outcome::Wrong)),
        format!("{mean_cords:.2}"),
        format!("{mean_steps:.2}"),
    ];
    if a.timing {
        header.push("mean_wall_ms");
        row.push(format!("{mean_ms:.3}"));
    } else {
        eprintln!("mean_wall_ms\t{mean_ms:.3}");
    }
    println!("{}", header.join("\t"));
    println!("{}", row.join("\t"));
    Ok(Status::Ok)
}
