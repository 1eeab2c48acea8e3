//! `lasso`: reconstruct trees from partial distances, classify cord sets,
//! generate stable triplet covers, and run simulation campaigns.
//!
//! Exit status: 0 success, 1 input error, 2 incomplete closure,
//! 3 inconsistent (non-additive) input.

mod simulate;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lasso_core::lasso::{
    closure, edge_weight_lasso_certificate, incidence_rank, is_2dtree, is_shellable,
    path_incidence_matrix, topological_lasso_oracle, tree_from_2dtree, validate_2dtree_ordering,
    ClosureTrace, Shelling, TopologicalVerdict, ORACLE_MAX_TAXA,
};
use lasso_core::random::random_order;
use lasso_core::{
    graph_necessary_checks, is_cover, is_triplet_cover, parse_cord_distances, parse_cord_distances_exact,
    parse_newick, reconstruct, transversal_by_rule, triplet_cover, write_newick, CordSet, Distance,
    PartialDistance, ReconstructError, Reconstruction, Taxon, Tolerance, Transversal, TransversalRule,
    XTree, DEFAULT_EPSILON,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "lasso", version, about = "Tree reconstruction from partial distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Close a cord-distance file under rule (R) and rebuild the tree.
    Reconstruct(ReconstructArgs),
    /// Report which lasso properties a cord set has for a tree.
    Classify(ClassifyArgs),
    /// Generate the stable triplet cover of a tree.
    Gencover(GencoverArgs),
    /// Run a seeded reconstruction campaign on random trees.
    Simulate(simulate::SimulateArgs),
    /// Build a tree for which a 2d-tree cord set closes completely.
    Treefrom2d(TreeFrom2dArgs),
    /// Run the rule-(R) fixpoint and print the completed distances.
    Closure(ClosureArgs),
}

#[derive(Args)]
struct ReconstructArgs {
    /// Cord-distance TSV (`-` for standard input).
    distances: PathBuf,
    /// Write the Newick tree here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the closure trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Read distances as exact decimals and close them without rounding.
    #[arg(long)]
    exact_rational: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Newick tree.
    tree: PathBuf,
    /// Cord-set TSV; a distance column, if present, is ignored.
    cords: PathBuf,
    /// Also run the brute-force topological-lasso oracle (at most 9 taxa).
    #[arg(long)]
    oracle_topological: bool,
    /// Print the shelling steps found.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Min,
    Closest,
    Furthest,
}

impl From<RuleArg> for TransversalRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Min => TransversalRule::Min,
            RuleArg::Closest => TransversalRule::Closest,
            RuleArg::Furthest => TransversalRule::Furthest,
        }
    }
}

#[derive(Args)]
struct GencoverArgs {
    /// Newick tree (fully resolved).
    tree: PathBuf,
    #[arg(long, value_enum, default_value = "min")]
    transversal: RuleArg,
    /// Taxon order (whitespace separated): ranks for `min`, tie-break for
    /// the distance rules.
    #[arg(long)]
    order: Option<PathBuf>,
    /// Shuffle the taxon order with this seed (ignored with --order).
    #[arg(long)]
    seed: Option<u64>,
    /// Explicit images, one cluster per line: `t1,t2,...<TAB>image`.
    /// Clusters not listed follow --transversal.
    #[arg(long)]
    assignment: Option<PathBuf>,
    /// Accept a transversal that is not stable.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TreeFrom2dArgs {
    /// Cord-set TSV.
    cords: PathBuf,
    /// Vertex ordering to use instead of searching for one.
    #[arg(long)]
    order: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClosureArgs {
    /// Cord-distance TSV (`-` for standard input).
    distances: PathBuf,
    #[arg(long)]
    exact_rational: bool,
    /// Write the derivation steps to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Status {
    Ok,
    Incomplete,
    Inconsistent,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(match s {
            Status::Ok => 0,
            Status::Incomplete => 2,
            Status::Inconsistent => 3,
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors are input errors; status 2 means incomplete closure.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Status> {
    let tol = tolerance_from_env()?;
    match cli.command {
        Command::Reconstruct(a) => cmd_reconstruct(a, &tol),
        Command::Classify(a) => cmd_classify(a),
        Command::Gencover(a) => cmd_gencover(a),
        Command::Simulate(a) => simulate::run(a, &tol),
        Command::Treefrom2d(a) => cmd_treefrom2d(a),
        Command::Closure(a) => cmd_closure(a, &tol),
    }
}

fn tolerance_from_env() -> Result<Tolerance> {
    match std::env::var("LASSO_EPSILON") {
        Err(_) => Ok(Tolerance::new(DEFAULT_EPSILON)),
        Ok(text) => {
            let eps: f64 = text
                .trim()
                .parse()
                .with_context(|| format!("LASSO_EPSILON={text:?} is not a number"))?;
            if !(eps.is_finite() && eps >= 0.0) {
                bail!("LASSO_EPSILON must be finite and non-negative, got {eps}");
            }
            Ok(Tolerance::new(eps))
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("reading standard input")?;
        return Ok(text);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing standard output"),
    }
}

fn read_tree(path: &Path) -> Result<XTree> {
    parse_newick(&read_input(path)?).with_context(|| format!("parsing tree {}", path.display()))
}

fn read_cords(path: &Path) -> Result<CordSet> {
    CordSet::parse(&read_input(path)?).with_context(|| format!("parsing cords {}", path.display()))
}

/// Whitespace-separated taxa; `#` starts a comment.
fn read_order(path: &Path) -> Result<Vec<Taxon>> {
    read_input(path)?
        .lines()
        .flat_map(|line| line.split('#').next().unwrap_or("").split_whitespace())
        .map(|s| Taxon::new(s).with_context(|| format!("invalid taxon {s:?} in {}", path.display())))
        .collect()
}

fn cord_list(cords: &[lasso_core::Cord]) -> String {
    cords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

fn write_trace<V: Distance>(path: Option<&Path>, trace: &ClosureTrace<V>) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, trace.to_text()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn cmd_reconstruct(a: ReconstructArgs, tol: &Tolerance) -> Result<Status> {
    let text = read_input(&a.distances)?;
    let context = || format!("parsing distances {}", a.distances.display());
    if a.exact_rational {
        let d = parse_cord_distances_exact(&text).with_context(context)?;
        finish_reconstruct(&d, tol, &a)
    } else {
        let d = parse_cord_distances(&text, tol).with_context(context)?;
        finish_reconstruct(&d, tol, &a)
    }
}

fn finish_reconstruct<V: Distance>(d: &PartialDistance<V>, tol: &Tolerance, a: &ReconstructArgs) -> Result<Status> {
    if d.is_empty() {
        bail!("{} holds no distances", a.distances.display());
    }
    match reconstruct(d, tol) {
        Ok(Reconstruction::Complete { tree, closure }) => {
            write_trace(a.trace.as_deref(), &closure)?;
            write_output(a.out.as_deref(), &format!("{}\n", write_newick(&tree)))?;
            Ok(Status::Ok)
        }
        Ok(Reconstruction::Incomplete { missing, closure }) => {
            write_trace(a.trace.as_deref(), &closure)?;
            eprintln!("closure incomplete; {} cords missing: {}", missing.len(), cord_list(&missing));
            Ok(Status::Incomplete)
        }
        Err(e) => inconsistency(e),
    }
}

fn inconsistency(e: ReconstructError) -> Result<Status> {
    if e.is_inconsistency() {
        eprintln!("inconsistent input: {e}");
        Ok(Status::Inconsistent)
    } else {
        Err(anyhow!(e))
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_classify(a: ClassifyArgs) -> Result<Status> {
    let tree = read_tree(&a.tree)?;
    let cords = read_cords(&a.cords)?;
    if let Some(t) = cords.taxa().iter().find(|t| tree.taxon_index(t.as_str()).is_none()) {
        bail!("cord set names taxon {t}, which is not a leaf of the tree");
    }
    if !tree.is_fully_resolved() {
        bail!("tree is not fully resolved");
    }
    let cords = cords.with_taxa(tree.taxa());
    let mut out = String::new();
    let mut line = |fields: &[&str]| {
        out.push_str(&fields.join("\t"));
        out.push('\n');
    };

    line(&["cover", yes(is_cover(&tree, &cords)?)]);
    line(&["triplet-cover", yes(is_triplet_cover(&tree, &cords)?)]);
    match is_shellable(&tree, &cords)? {
        Shelling::Shellable(trace) => {
            line(&["shellable", "yes"]);
            if a.trace {
                for step in &trace.steps {
                    line(&["shelling-step", &step.to_string()]);
                }
            }
        }
        Shelling::NotShellable { missing, .. } => {
            line(&["shellable", "no", &format!("stalls missing {}", cord_list(&missing))]);
        }
    }
    match is_2dtree(&cords) {
        Some(order) => {
            let order: Vec<&str> = order.iter().map(Taxon::as_str).collect();
            line(&["2d-tree", "yes", &order.join(",")]);
        }
        None => line(&["2d-tree", "no"]),
    }
    let rank = incidence_rank(&path_incidence_matrix(&tree, &cords)?);
    line(&[
        "edge-weight-lasso",
        yes(edge_weight_lasso_certificate(&tree, &cords)?),
        &format!("rank {rank} of {}", tree.edges().len()),
    ]);
    let checks = graph_necessary_checks(&cords, tree.taxa());
    line(&["connected", yes(checks.connected)]);
    line(&["non-bipartite", yes(checks.all_components_non_bipartite)]);
    if a.oracle_topological {
        if tree.n_taxa() > ORACLE_MAX_TAXA {
            line(&["topological", "skipped", &format!("more than {ORACLE_MAX_TAXA} taxa")]);
        } else {
            match topological_lasso_oracle(&tree, &cords)? {
                TopologicalVerdict::GenericallyTopological => line(&["topological", "generically-topological"]),
                TopologicalVerdict::Refuted { tree } => line(&["topological", "refuted", &write_newick(&tree)]),
            }
        }
    }
    write_output(None, &out)?;
    Ok(Status::Ok)
}

/// Lines `t1,t2,...<TAB>image`.
fn read_assignment(path: &Path, tree: &XTree) -> Result<Transversal> {
    let mut f = Transversal::new();
    for (i, raw) in read_input(path)?.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = || format!("{}:{}", path.display(), i + 1);
        let (cluster, image) = line
            .split_once('\t')
            .ok_or_else(|| anyhow!("{}: expected `taxa<TAB>image`", at()))?;
        let members: Vec<&str> = cluster.split(',').map(str::trim).collect();
        f.set_labels(tree, &members, image.trim()).with_context(at)?;
    }
    Ok(f)
}

fn cmd_gencover(a: GencoverArgs) -> Result<Status> {
    let tree = read_tree(&a.tree)?;
    let order = match (&a.order, a.seed) {
        (Some(p), _) => read_order(p)?,
        (None, Some(seed)) => random_order(&tree, &mut ChaCha8Rng::seed_from_u64(seed)),
        (None, None) => tree.taxa().to_vec(),
    };
    let rule_f = transversal_by_rule(&tree, a.transversal.into(), &order)?;
    let f = match &a.assignment {
        Some(p) => read_assignment(p, &tree)?.completed_with(&tree, &rule_f),
        None => rule_f,
    };
    let cover = triplet_cover(&tree, &f, a.force)?;
    let expected = 2 * tree.n_taxa() - 3;
    eprintln!("|L| = {} (2n-3 = {expected})", cover.len());
    write_output(a.out.as_deref(), &cover.to_tsv())?;
    if cover.len() != expected && !a.force {
        eprintln!("stable triplet cover has the wrong size");
        return Ok(Status::Inconsistent);
    }
    Ok(Status::Ok)
}

fn cmd_treefrom2d(a: TreeFrom2dArgs) -> Result<Status> {
    let cords = read_cords(&a.cords)?;
    let order = match &a.order {
        Some(p) => {
            let order = read_order(p)?;
            validate_2dtree_ordering(&cords, &order)?;
            order
        }
        None => is_2dtree(&cords).ok_or_else(|| anyhow!("cord set is not a 2d-tree"))?,
    };
    let tree = tree_from_2dtree(&cords, &order)?;
    let order: Vec<&str> = order.iter().map(Taxon::as_str).collect();
    eprintln!("order\t{}", order.join(","));
    write_output(a.out.as_deref(), &format!("{}\n", write_newick(&tree)))?;
    Ok(Status::Ok)
}

fn cmd_closure(a: ClosureArgs, tol: &Tolerance) -> Result<Status> {
    let text = read_input(&a.distances)?;
    let context = || format!("parsing distances {}", a.distances.display());
    if a.exact_rational {
        finish_closure(&parse_cord_distances_exact(&text).with_context(context)?, tol, &a)
    } else {
        finish_closure(&parse_cord_distances(&text, tol).with_context(context)?, tol, &a)
    }
}

fn finish_closure<V: Distance>(d: &PartialDistance<V>, tol: &Tolerance, a: &ClosureArgs) -> Result<Status> {
    let trace = match closure(d, tol) {
        Ok(trace) => trace,
        Err(e) => return inconsistency(ReconstructError::from(e)),
    };
    write_trace(a.trace.as_deref(), &trace)?;
    write_output(a.out.as_deref(), &trace.result.to_tsv())?;
    eprintln!("{} cords derived", trace.steps.len());
    if trace.is_complete() {
        Ok(Status::Ok)
    } else {
        let missing = trace.missing();
        eprintln!("closure incomplete; {} cords missing: {}", missing.len(), cord_list(&missing));
        Ok(Status::Incomplete)
    }
}
