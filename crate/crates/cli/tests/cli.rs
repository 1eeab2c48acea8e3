use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn lasso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lasso"))
        .args(args)
        .env_remove("LASSO_EPSILON")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field(report: &str, key: &str) -> Vec<String> {
    report
        .lines()
        .map(|l| l.split('\t').collect::<Vec<_>>())
        .find(|f| f[0] == key)
        .unwrap_or_else(|| panic!("no {key} line in {report}"))[1..]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

#[test]
fn reconstruct_caterpillar() {
    let o = lasso(&["reconstruct", &fixture("caterpillar7_distances.tsv")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let expected = lasso_core::write_newick(&lasso_core::fixtures::caterpillar7());
    assert_eq!(stdout(&o).trim(), expected);
}

#[test]
fn reconstruct_writes_tree_and_trace_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tree.nwk");
    let trace = dir.path().join("trace.txt");
    let o = lasso(&[
        "reconstruct",
        &fixture("caterpillar7_distances.tsv"),
        "--exact-rational",
        "--out",
        out.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let tree = lasso_core::parse_newick(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(tree.is_equivalent(&lasso_core::fixtures::caterpillar7()).unwrap());
    let steps = std::fs::read_to_string(trace).unwrap();
    assert_eq!(steps.lines().count(), 10);
    assert!(steps.lines().all(|l| l.contains(":=") && l.contains(" via (")));
}

#[test]
fn reconstruct_exit_statuses() {
    let o = lasso(&["reconstruct", &fixture("incomplete.tsv")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("a c, b c"), "{}", stderr(&o));

    let o = lasso(&["reconstruct", &fixture("negative.tsv")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = lasso(&["reconstruct", &fixture("nonadditive.tsv")]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let o = lasso(&["reconstruct", "/nonexistent/file.tsv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn epsilon_from_environment() {
    let run = |eps: &str| {
        Command::new(env!("CARGO_BIN_EXE_lasso"))
            .args(["reconstruct", &fixture("caterpillar7_distances.tsv")])
            .env("LASSO_EPSILON", eps)
            .output()
            .unwrap()
    };
    assert_eq!(run("1e-6").status.code(), Some(0));
    assert_eq!(run("-1").status.code(), Some(1));
    assert_eq!(run("abc").status.code(), Some(1));
}

#[test]
fn classify_three_cherry_cover() {
    let o = lasso(&[
        "classify",
        &fixture("three_cherries.nwk"),
        &fixture("three_cherries_cover.tsv"),
        "--oracle-topological",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = stdout(&o);
    for key in ["cover", "triplet-cover", "shellable", "2d-tree", "edge-weight-lasso", "connected", "non-bipartite"] {
        assert_eq!(field(&r, key)[0], "yes", "{key}");
    }
    assert_eq!(field(&r, "edge-weight-lasso")[1], "rank 9 of 9");
    assert_eq!(field(&r, "topological"), ["generically-topological"]);
}

#[test]
fn classify_quartet_2dtree() {
    let o = lasso(&[
        "classify",
        &fixture("quartet.nwk"),
        &fixture("quartet_2dtree.tsv"),
        "--oracle-topological",
    ]);
    let r = stdout(&o);
    assert_eq!(field(&r, "2d-tree")[0], "yes");
    assert_eq!(field(&r, "shellable")[0], "no");
    assert_eq!(field(&r, "topological")[0], "refuted");
}

#[test]
fn classify_all_cords_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let all = dir.path().join("all.tsv");
    let t = lasso_core::fixtures::caterpillar7();
    std::fs::write(&all, lasso_core::CordSet::complete(t.taxa()).to_tsv()).unwrap();
    let o = lasso(&["classify", &fixture("caterpillar7.nwk"), all.to_str().unwrap(), "--oracle-topological"]);
    let r = stdout(&o);
    for key in ["cover", "triplet-cover", "shellable", "edge-weight-lasso", "connected", "non-bipartite"] {
        assert_eq!(field(&r, key)[0], "yes", "{key}");
    }
    assert_eq!(field(&r, "topological"), ["generically-topological"]);

    let o = lasso(&["classify", &fixture("caterpillar7.nwk"), &fixture("caterpillar7_lasso.tsv"), "--trace"]);
    let r = stdout(&o);
    assert_eq!(r.lines().filter(|l| l.starts_with("shelling-step\t")).count(), 10);
    assert!(!r.contains("topological\t"));
}

#[test]
fn classify_rejects_foreign_taxa() {
    let o = lasso(&["classify", &fixture("quartet.nwk"), &fixture("three_cherries_cover.tsv")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not a leaf"));
}

#[test]
fn gencover_from_assignment() {
    let o = lasso(&[
        "gencover",
        &fixture("three_cherries.nwk"),
        "--assignment",
        &fixture("three_cherries_assignment.tsv"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let got = lasso_core::CordSet::parse(&stdout(&o)).unwrap();
    assert_eq!(got, lasso_core::fixtures::three_cherries_cover());
    assert!(stderr(&o).contains("|L| = 9"));
}

#[test]
fn gencover_partial_assignment_is_unstable() {
    let tree = fixture("three_cherries.nwk");
    let partial = fixture("three_cherries_assignment_partial.tsv");
    let o = lasso(&["gencover", &tree, "--assignment", &partial]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not stable"), "{}", stderr(&o));
    let o = lasso(&["gencover", &tree, "--assignment", &partial, "--force"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn gencover_modes() {
    let o = lasso(&["gencover", &fixture("star.nwk"), "--transversal", "closest"]);
    assert_eq!(stdout(&o), "x\ty\nx\tz\ny\tz\n");

    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("t.nwk");
    std::fs::write(&tree, lasso_core::write_newick(&lasso_core::random_tree(10, 4, (0.5, 2.0)).unwrap())).unwrap();
    for mode in ["min", "closest", "furthest"] {
        let o = lasso(&["gencover", tree.to_str().unwrap(), "--transversal", mode, "--seed", "9"]);
        assert_eq!(o.status.code(), Some(0), "{mode}: {}", stderr(&o));
        assert_eq!(stdout(&o).lines().count(), 17, "{mode}");
    }

    let zero = dir.path().join("zero.nwk");
    std::fs::write(&zero, "((a:1,b:1):0,c:1,d:1);").unwrap();
    let o = lasso(&["gencover", zero.to_str().unwrap(), "--transversal", "furthest"]);
    assert_eq!(o.status.code(), Some(1));
    let o = lasso(&["gencover", zero.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn gencover_with_order_file() {
    let dir = tempfile::tempdir().unwrap();
    let order = dir.path().join("order.txt");
    std::fs::write(&order, "c c' b b'\na a'\n").unwrap();
    let o = lasso(&["gencover", &fixture("three_cherries.nwk"), "--order", order.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    // Under the min rule every component maps to its c-most taxon: the
    // central triangle is a c b.
    let cords = lasso_core::CordSet::parse(&stdout(&o)).unwrap();
    assert!(cords.contains_pair("a", "c") && cords.contains_pair("b", "c") && cords.contains_pair("a", "b"));
}

#[test]
fn treefrom2d_outputs() {
    let o = lasso(&["treefrom2d", &fixture("quartet_2dtree.tsv")]);
    assert_eq!(o.status.code(), Some(0));
    let tree = lasso_core::parse_newick(&stdout(&o)).unwrap();
    assert!(tree.is_fully_resolved());

    let o = lasso(&["treefrom2d", &fixture("triangle.tsv")]);
    assert_eq!(stdout(&o).trim(), "(x:1,y:1,z:1);");

    let o = lasso(&["treefrom2d", &fixture("caterpillar7_distances.tsv")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("order\ta,b,d,g,c,f,e"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("order.txt");
    std::fs::write(&bad, "a b d c g f e").unwrap();
    let o = lasso(&["treefrom2d", &fixture("caterpillar7_lasso.tsv"), "--order", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn closure_subcommand() {
    let o = lasso(&["closure", &fixture("caterpillar7_distances.tsv")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 21);
    assert!(stdout(&o).contains("c\tf\t5\n"));

    let o = lasso(&["closure", &fixture("incomplete.tsv")]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "a\tb\t2\n");
}

#[test]
fn simulate_reports() {
    let o = lasso(&["simulate", "--n", "8", "--trials", "100", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let row: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let col = |k: &str| row[header.iter().position(|h| *h == k).unwrap()];
    assert_eq!(col("success_rate"), "1.0000");
    assert!(stderr(&o).starts_with("mean_wall_ms\t"));

    let o = lasso(&["simulate", "--n", "3", "--trials", "10"]);
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(&row[6..], ["1.0000", "0.0000", "0.0000", "0.0000", "3.00", "0.00"]);

    let o = lasso(&["simulate", "--n", "10", "--trials", "100", "--dropout", "0.99", "--drop-cover", "--seed", "2"]);
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split('\t').collect();
    let success: f64 = row[6].parse().unwrap();
    let incomplete: f64 = row[7].parse().unwrap();
    assert!(success < 0.05 && incomplete > 0.9, "{text}");
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate", "--n", "11", "--trials", "60", "--seed", "5", "--dropout", "0.2", "--extra", "8", "--drop-cover",
        "--transversal", "closest",
    ];
    let a = lasso(&args);
    let b = lasso(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn simulate_rejects_bad_parameters() {
    for args in [
        &["simulate", "--n", "2"][..],
        &["simulate", "--n", "5", "--trials", "0"],
        &["simulate", "--n", "5", "--dropout", "1"],
        &["simulate", "--n", "5", "--weight-range", "2,1"],
    ] {
        let o = lasso(args);
        assert_ne!(o.status.code(), Some(0), "{args:?}");
    }
}
