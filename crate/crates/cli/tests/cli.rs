use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

use rrsynth_core::format::{write_game, write_strategy};
use rrsynth_core::games;

const BIN: &str = env!("CARGO_BIN_EXE_rrsynth");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn out(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn err(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn save(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn fig1(dir: &TempDir) -> PathBuf {
    save(dir, "fig1.rrg", &write_game(&games::fig1()))
}

#[test]
fn check_prints_parameters() {
    let dir = TempDir::new().unwrap();
    let o = run(&["check", p(&fig1(&dir))]);
    assert_eq!(code(&o), 0);
    let text = out(&o);
    for line in ["s: 8", "k: 2", "val_G: 128", "t_max: 210 210"] {
        assert!(text.contains(line), "{text}");
    }
}

#[test]
fn check_abbreviates_huge_thresholds() {
    let dir = TempDir::new().unwrap();
    let g = games::blades(8).unwrap();
    let o = run(&["check", p(&save(&dir, "b.rrg", &write_game(&g)))]);
    assert_eq!(code(&o), 0);
    assert!(out(&o).contains("digits>"), "{}", out(&o));
}

#[test]
fn gen_writes_a_parsable_game() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("b.rrg");
    assert_eq!(
        code(&run(&["gen", "blades", "--k", "3", "-o", p(&file)])),
        0
    );
    let o = run(&["check", p(&file)]);
    assert_eq!(code(&o), 0);
    assert!(out(&o).contains("k: 3"));
    assert_eq!(out(&run(&["gen", "fig2"])), write_game(&games::fig2()));
}

#[test]
fn solve_then_eval() {
    let dir = TempDir::new().unwrap();
    let game = fig1(&dir);
    let strat = dir.path().join("s.json");
    let o = run(&["solve", p(&game), "-o", p(&strat)]);
    assert_eq!(code(&o), 0);
    assert!(out(&o).contains("W0: q r1 r12 r2 p p1 p2 e"));
    let o = run(&["eval", p(&game), "--strategy", p(&strat), "--from", "q"]);
    assert_eq!(code(&o), 0);
    assert!(out(&o).starts_with("q "));
}

#[test]
fn optimal_records_cap_provenance() {
    let dir = TempDir::new().unwrap();
    let game = fig1(&dir);
    let o = run(&["optimal", p(&game), "--cap", "8"]);
    assert_eq!(code(&o), 0);
    assert!(out(&o).contains("caps: 8 8 (user)"));
    assert!(out(&o).contains("q 28/5"));

    let o = run(&[
        "optimal",
        p(&game),
        "--cap",
        "1=3",
        "--cap",
        "2=6",
        "--json",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["caps"], serde_json::json!([3, 6]));
    assert_eq!(doc["provenance"], "user");
    assert_eq!(doc["unconditional"], false);

    let o = run(&["optimal", p(&game), "--size-limit", "500"]);
    assert!(out(&o).contains("(size-limited)"), "{}", out(&o));
}

#[test]
fn optimal_strategy_file_evaluates_to_reported_values() {
    let dir = TempDir::new().unwrap();
    let game = fig1(&dir);
    let strat = dir.path().join("o.json");
    let o = run(&["optimal", p(&game), "--cap", "10", "-o", p(&strat)]);
    assert_eq!(code(&o), 0);
    let values: Vec<String> = out(&o).lines().skip(3).map(String::from).collect();
    let e = run(&["eval", p(&game), "--strategy", p(&strat)]);
    assert_eq!(
        out(&e).lines().map(String::from).collect::<Vec<_>>(),
        values
    );
}

#[test]
fn lasso_value() {
    let dir = TempDir::new().unwrap();
    let game = fig1(&dir);
    let o = run(&["value", p(&game), "--lasso", ";q,r12,p,p1,e,q,r12,p,p2,e"]);
    assert_eq!((code(&o), out(&o).trim()), (0, "28/5"));
    let o = run(&["value", p(&game), "--lasso", "q,r1;p,p1,e,q,r1"]);
    assert_eq!(out(&o).trim(), "3/5");
    let o = run(&["value", p(&game), "--lasso", "q;q"]);
    assert_eq!(code(&o), 2);
    let o = run(&["value", p(&game), "--lasso", "q,r1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn oracle_compare_agrees() {
    let dir = TempDir::new().unwrap();
    let o = run(&["oracle", p(&fig1(&dir)), "--cap", "6", "--compare"]);
    assert_eq!(code(&o), 0, "{}", err(&o));
    assert!(out(&o).contains("agrees"));
}

#[test]
fn dickson_values() {
    let o = run(&["dickson", "2", "2", "--closed"]);
    assert_eq!(code(&o), 0);
    assert!(out(&o).starts_with("b(2,2) = 131\n"));
    assert!(out(&o).contains("recursion <= closed form: yes"));
}

#[test]
fn play_with_script_and_interactive_input() {
    let dir = TempDir::new().unwrap();
    let g = games::fig1();
    let game = fig1(&dir);
    let strat = save(
        &dir,
        "alt.json",
        &write_strategy(g.arena(), &games::fig1_alternating(&g).unwrap()),
    );
    let o = run(&[
        "play",
        p(&game),
        "--strategy",
        p(&strat),
        "--from",
        "q",
        "--script",
        "r12",
        "--steps",
        "5",
    ]);
    assert_eq!(code(&o), 0, "{}", err(&o));
    let rows: Vec<String> = out(&o).lines().skip(1).map(String::from).collect();
    assert_eq!(rows[1], "1 r12 (1,1) 2");
    assert_eq!(rows.len(), 5);

    let o = run(&[
        "play",
        p(&game),
        "--strategy",
        p(&strat),
        "--from",
        "q",
        "--script",
        "r1",
        "--steps",
        "8",
    ]);
    assert_eq!(code(&o), 2, "script runs out at the second choice");

    let mut child = Command::new(BIN)
        .args([
            "play",
            p(&game),
            "--strategy",
            p(&strat),
            "--from",
            "q",
            "--interactive",
            "--steps",
            "6",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"nowhere\nr2\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0, "{}", err(&o));
    assert!(err(&o).contains("not a successor"));
    assert!(out(&o).contains("1 r2 "));
}

#[test]
fn play_needs_an_opponent() {
    let dir = TempDir::new().unwrap();
    let game = fig1(&dir);
    let o = run(&["play", p(&game), "--strategy", "x.json", "--from", "q"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn dot_output() {
    let dir = TempDir::new().unwrap();
    let game = fig1(&dir);
    let o = run(&["dot", p(&game)]);
    assert!(out(&o).starts_with("digraph"));
    let o = run(&["dot", p(&game), "--product", "mpg", "--cap", "2"]);
    assert!(out(&o).contains("q@0"));
    let o = run(&["dot", p(&game), "--product", "buchi"]);
    assert_eq!(code(&o), 0);
    assert!(out(&o).contains("peripheries=2"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["check", "/no/such/file"])), 1);

    let bad = save(&dir, "bad.rrg", "[vertices]\na 2\n");
    let o = run(&["check", p(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(err(&o).contains("bad.rrg: 2:3:"), "{}", err(&o));

    let dead = save(&dir, "dead.rrg", "[vertices]\na 0\nb 0\n[edges]\na -> b\n");
    assert_eq!(code(&run(&["check", p(&dead)])), 2);

    let game = fig1(&dir);
    assert_eq!(code(&run(&["optimal", p(&game), "--cap", "0"])), 1);
    assert_eq!(code(&run(&["optimal", p(&game), "--cap", "3=4"])), 1);
    assert_eq!(
        code(&run(&[
            "optimal",
            p(&game),
            "--cap",
            "50",
            "--size-limit",
            "10"
        ])),
        3
    );
    assert_eq!(code(&run(&["eval", p(&game), "--strategy", p(&game)])), 1);
}
