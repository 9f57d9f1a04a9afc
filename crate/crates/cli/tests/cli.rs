use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_saturachase"))
        .args(args)
        .env_remove("SATURACHASE_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eqsat_run_reports_counts() {
    let o = run(&[
        "eqsat",
        "run",
        "--trs",
        &corpus("fxx.trs"),
        "--term",
        &corpus("fig1.term"),
        "--budget",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "status=terminated classes=4 nodes=7\n");
}

#[test]
fn eqsat_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let eg = dir.path().join("out.eg");
    let dot = dir.path().join("out.dot");
    let o = run(&[
        "eqsat",
        "run",
        "--trs",
        &corpus("fxx.trs"),
        "--egraph",
        &corpus("fig1.eg"),
        "--output",
        eg.to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&eg).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
}

#[test]
fn strict_budget_exit_code() {
    let args = [
        "eqsat",
        "run",
        "--trs",
        &corpus("cyclic.trs"),
        "--egraph",
        &corpus("cyclic.eg"),
        "--budget",
        "5",
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("status=budget"));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(run(&strict).status.code(), Some(3));
}

#[test]
fn verify_chase_passes() {
    let o = run(&[
        "verify",
        "chase",
        "--trs",
        &corpus("fxx.trs"),
        "--egraph",
        &corpus("t8.eg"),
        "--seeds",
        "1,2,3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.ends_with("check=chase_equiv status=pass detail=9 checks\n"),
        "{out}"
    );
}

#[test]
fn verify_skolem_passes() {
    let o = run(&[
        "verify",
        "skolem",
        "--deps",
        &corpus("dept.deps"),
        "--instance",
        &corpus("dept.inst"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("check=skolem_equiv status=pass"));
}

#[test]
fn verify_failure_exit_code() {
    // too small a budget for saturation but enough for the chase
    let o = run(&[
        "verify",
        "skolem",
        "--deps",
        &corpus("chain.deps"),
        "--instance",
        &corpus("chain.inst"),
        "--budget",
        "1",
        "--chase-budget",
        "50",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("check=skolem_equiv status=fail"));
}

#[test]
fn acyclicity_checks() {
    let o = run(&["check-acyclic", "--trs", &corpus("ex19.trs")]);
    assert_eq!(stdout(&o), "weak_term_acyclic=true\n");
    let o = run(&["check-acyclic", "--trs", &corpus("grow.trs")]);
    assert_eq!(stdout(&o), "weak_term_acyclic=false witness=(f,1)->(g,1)*->(f,1)\n");
    let o = run(&["check-acyclic", "--deps", &corpus("path.deps")]);
    assert_eq!(stdout(&o), "weakly_acyclic=true\n");
}

#[test]
fn chase_runs_are_deterministic() {
    let args = [
        "chase",
        "run",
        "--deps",
        &corpus("key.deps"),
        "--instance",
        &corpus("key.inst"),
        "--scheduler",
        "random",
        "--seeds",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("status=terminated"));
}

#[test]
fn skolem_run() {
    let o = run(&[
        "skolem",
        "run",
        "--deps",
        &corpus("loop.deps"),
        "--instance",
        &corpus("loop.inst"),
        "--budget",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("status=budget"));
}

#[test]
fn encodings_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let deps = dir.path().join("enc.deps");
    let inst = dir.path().join("enc.inst");
    let o = run(&[
        "encode",
        "eqsat2chase",
        "--trs",
        &corpus("fxx.trs"),
        "--egraph",
        &corpus("fig1.eg"),
        "--deps-out",
        deps.to_str().unwrap(),
        "--instance-out",
        inst.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[
        "chase",
        "run",
        "--deps",
        deps.to_str().unwrap(),
        "--instance",
        inst.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o), "status=terminated scheduler=egd_fair steps=3 atoms=7\n");

    let trs = dir.path().join("enc.trs");
    let o = run(&[
        "encode",
        "skolem2eqsat",
        "--deps",
        &corpus("chain.deps"),
        "--instance",
        &corpus("chain.inst"),
        "--output",
        trs.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&trs).unwrap();
    assert!(text.ends_with("; start top\n"));
    let term = dir.path().join("top.term");
    std::fs::write(&term, "top").unwrap();
    let o = run(&[
        "eqsat",
        "run",
        "--trs",
        trs.to_str().unwrap(),
        "--term",
        term.to_str().unwrap(),
    ]);
    assert!(stdout(&o).starts_with("status=terminated"));
}

#[test]
fn generators() {
    let dir = tempfile::tempdir().unwrap();
    let trs = dir.path().join("pcp.trs");
    let o = run(&[
        "gen",
        "pcp",
        "--pcp",
        &corpus("solvable.pcp"),
        "--output",
        trs.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let term = dir.path().join("start.term");
    std::fs::write(&term, "(k eps eps)").unwrap();
    let o = run(&[
        "eqsat",
        "run",
        "--trs",
        trs.to_str().unwrap(),
        "--term",
        term.to_str().unwrap(),
        "--budget",
        "100",
    ]);
    assert!(stdout(&o).starts_with("status=terminated"));

    let o = run(&["gen", "tm", "--tm", &corpus("halting.tm")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("; start (lmark (q0 (a (rmark eps))))\n"));
}

#[test]
fn export_dot_variants() {
    let o = run(&["export", "dot", "--trs", &corpus("grow.trs")]);
    assert!(stdout(&o).contains("[label=\"*\"]"));
    let o = run(&["export", "dot", "--egraph", &corpus("fig1.eg")]);
    assert!(stdout(&o).starts_with("digraph egraph"));
    let o = run(&["export", "dot", "--deps", &corpus("loop.deps")]);
    assert!(stdout(&o).starts_with("digraph"));
    assert_eq!(run(&["export", "dot"]).status.code(), Some(2));
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["eqsat", "run"]).status.code(), Some(2));
    assert_eq!(
        run(&["eqsat", "run", "--trs", &corpus("fxx.trs"), "--budget", "0"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.trs");
    std::fs::write(&bad, "(f ?x) -> (g ?x)\n(f ?x ?y) -> ?x\n").unwrap();
    let o = run(&["check-acyclic", "--trs", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
}
