//! End-to-end runs of the `genkripke` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genkripke"))
        .args(args)
        .env_remove("GENKRIPKE_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

const OR_SEQUENT: &str = "forall x. or(p(x), r) => or(forall x. p(x), r)";

const DIAMOND: &str = r#"
worlds = ["a", "b", "c", "d"]
order = [["a", "b"], ["a", "c"], ["b", "d"], ["c", "d"]]
facts = [{ world = "d", pred = "p", args = ["e1"] }]
[domains]
a = ["e1"]
b = ["e1"]
c = ["e1"]
d = ["e1"]
"#;

#[test]
fn or_is_reported_non_supermultiplicative_and_monotone() {
    let o = run(&["analyze-connective", "--builtin", "or"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("supermultiplicative: no"));
    assert!(out.contains("monotone: yes"));
    assert!(out.contains("witness: a = (0,1), b = (1,0)"));
}

#[test]
fn table_argument_matches_builtin() {
    let by_table = stdout(&run(&["analyze-connective", "--table", "0110", "--name", "xor"]));
    let by_name = stdout(&run(&["analyze-connective", "--builtin", "xor"]));
    assert_eq!(by_table, by_name);
    assert_eq!(run(&["analyze-connective", "--table", "011"]).status.code(), Some(2));
}

#[test]
fn or_sequent_is_cd_valid_but_kripke_refuted() {
    let seq = scratch("or.seq", OR_SEQUENT);
    let cd = run(&["decide", "--mode", "cd", "--max-worlds", "3", "--max-domain", "2", "--shape", "tree", "--seq", &seq]);
    assert_eq!(cd.status.code(), Some(0));
    assert!(stdout(&cd).starts_with("ValidUpToBounds"));
    let k = run(&["decide", "--mode", "kripke", "--max-worlds", "2", "--seq", &seq]);
    assert_eq!(k.status.code(), Some(1));
    let out = stdout(&k);
    assert!(out.starts_with("Refuted (mode kripke)"));
    assert!(out.contains("worlds = [\"w1\", \"w2\"]"));
}

#[test]
fn emitted_countermodel_round_trips_through_unravel() {
    let seq = scratch("dneg.seq", "not(not(p)) => p");
    let o = run(&["decide", "--seq", &seq]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let model = out.split_once("\n\n").unwrap().1;
    let path = scratch("dneg-model.toml", model);
    assert_eq!(run(&["unravel", "--strict", &path]).status.code(), Some(0));
}

#[test]
fn synthesize_writes_a_certificate() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("xor.cert");
    let o = run(&["synthesize", "--builtin", "xor", "--cd-bounds", "2", "2", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let cert = std::fs::read_to_string(&path).unwrap();
    assert!(cert.contains("sequent: T, forall x. xor(p(x), q(x)) => xor(forall x. p(x), exists x. q(x))"));
    assert!(cert.contains("sequent value = 0"));
    assert!(cert.contains("[K*]"));
    let again = run(&["synthesize", "--builtin", "xor", "--cd-bounds", "2", "2"]);
    assert_eq!(stdout(&again), cert, "output is deterministic");
}

#[test]
fn supermultiplicative_connective_cannot_be_synthesized() {
    assert_eq!(run(&["synthesize", "--builtin", "and"]).status.code(), Some(2));
}

#[test]
fn signature_file_supplies_the_connective() {
    let sig = scratch("sig.toml", "[connectives]\nmaj = { arity = 3, table = \"00010111\" }\n");
    let o = run(&["analyze-connective", "--connective", &sig]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("connective: maj (arity 3, table 00010111)"));
}

#[test]
fn diamond_unravels_to_five_nodes_and_completes() {
    let model = scratch("diamond.toml", DIAMOND);
    let o = run(&["unravel", "--strict", &model]);
    assert_eq!(o.status.code(), Some(0));
    let tree = stdout(&o);
    assert!(tree.starts_with("worlds = [\"a\", \"a.b\", \"a.c\", \"a.b.d\", \"a.c.d\"]"));
    let tree_path = scratch("diamond-tree.toml", &tree);
    let c = run(&["complete", &tree_path]);
    assert_eq!(c.status.code(), Some(0));
    assert!(stdout(&c).contains("elements = [\"F1\", \"F2\", \"F3\", \"F4\", \"F5\"]"));
    // the diamond itself is not a tree
    assert_eq!(run(&["complete", &model]).status.code(), Some(3));
}

#[test]
fn main_lemma_report_is_json() {
    let tree = stdout(&run(&["unravel", "--strict", &scratch("diamond2.toml", DIAMOND)]));
    let path = scratch("diamond2-tree.toml", &tree);
    let o = run(&["check-main-lemma", &path, "p(x)", "--assign", "x=F1", "--node", "a.b.d"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("\"status\": \"holds\""));
    assert!(out.contains("\"node\": \"a.b.d\""));
    assert_eq!(run(&["check-main-lemma", &path, "p(x)", "--assign", "x=F9"]).status.code(), Some(2));
}

#[test]
fn census_counts_binary_functions() {
    let out = stdout(&run(&["census", "--arity", "2"]));
    assert!(out.contains("supermultiplicative=false monotonic=true: 1 [0111]"));
    assert!(out.contains("supermultiplicative=false monotonic=false: 1 [0110]"));
}

#[test]
fn relations_for_monotone_builtins() {
    let o = run(&["--workers", "2", "report-relations", "--builtins", "and,or", "--corpus", "10", "--seed", "1", "--shape", "poset"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("FOILS = FOCDS: false"));
    assert!(out.contains("FOCDS = FOCLS: true"));
    assert!(out.contains("0 violations"));
}

#[test]
fn error_exit_codes() {
    assert_eq!(run(&["decide", "--seq", "/nonexistent/seq"]).status.code(), Some(2));
    let bad_seq = scratch("bad.seq", "p(x => ");
    assert_eq!(run(&["decide", "--seq", &bad_seq]).status.code(), Some(2));
    let bad_model = scratch("bad.toml", "worlds = [\"a\"]\n[domains]\nb = []\n");
    assert_eq!(run(&["unravel", "--strict", &bad_model]).status.code(), Some(3));
    assert_eq!(run(&["unravel", &bad_model]).status.code(), Some(2));
    let cyclic = scratch("cycle.toml", "worlds = [\"a\", \"b\"]\norder = [[\"a\", \"b\"], [\"b\", \"a\"]]\n[domains]\na = [\"e\"]\nb = [\"e\"]\n");
    assert_eq!(run(&["unravel", "--strict", &cyclic]).status.code(), Some(3));
    assert_eq!(run(&["unravel", "--stutter", "2", &cyclic]).status.code(), Some(0));
}
