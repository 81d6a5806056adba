use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dnfrule")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn with_data() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["gen-data", "tictactoe", "--out", "t.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    dir
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines().find_map(|l| l.strip_prefix(key)).unwrap_or_else(|| panic!("no `{key}` in {text}")).trim()
}

#[test]
fn gen_data_writes_the_board_table_and_refuses_to_overwrite() {
    let dir = with_data();
    let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(text.lines().count(), 959);
    assert!(text.starts_with("cell_r0_c0,"));
    assert_eq!(run(dir.path(), &["gen-data", "--out", "t.csv"]).status.code(), Some(2));
    assert!(run(dir.path(), &["gen-data", "--out", "t.csv", "--force"]).status.success());
    assert_eq!(run(dir.path(), &["gen-data", "chess", "--out", "c.csv"]).status.code(), Some(2));
}

#[test]
fn machine_training_recovers_the_board_and_eval_agrees() {
    let dir = with_data();
    let o = run(dir.path(), &["train", "--data", "t.csv", "--out", "m"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(field(&out, "training accuracy:"), "1.0000");
    for f in ["model.json", "report.json", "rules.txt", "manifest.json"] {
        assert!(dir.path().join("m").join(f).is_file(), "{f}");
    }
    let rules = std::fs::read_to_string(dir.path().join("rules.txt"));
    assert!(rules.is_err());
    std::fs::write(dir.path().join("truth.txt"), std::fs::read(dir.path().join("m/rules.txt")).unwrap()).unwrap();
    let e = run(dir.path(), &["eval", "--model", "m/model.json", "--data", "t.csv", "--reference", "truth.txt", "--out", "e.csv"]);
    assert!(e.status.success(), "{}", stderr(&e));
    assert_eq!(field(&stdout(&e), "accuracy:"), "1.0000");
    assert_eq!(field(&stdout(&e), "similarity:"), "1.0000");
    let csv = std::fs::read_to_string(dir.path().join("e.csv")).unwrap();
    assert!(csv.starts_with("fold,metric,value\n0,accuracy,1\n"));
    assert_eq!(run(dir.path(), &["train", "--data", "t.csv", "--out", "m"]).status.code(), Some(2));
}

#[test]
fn hard_mode_over_budget_is_a_named_infeasibility() {
    let dir = with_data();
    std::fs::write(dir.path().join("r.txt"), "cell_r0_c0 == x AND cell_r0_c1 == x AND cell_r0_c2 == x\n").unwrap();
    let o = run(dir.path(), &["train", "--data", "t.csv", "--rules", "r.txt", "--mode", "hard", "--complexity", "2", "--out", "h"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("human rules exceed complexity budget"));
    assert!(!dir.path().join("h/model.json").exists());
}

#[test]
fn soft_mode_reports_which_human_rules_survive() {
    let dir = with_data();
    std::fs::write(dir.path().join("r.txt"), "cell_r0_c0 == x AND cell_r0_c1 == x AND cell_r0_c2 == x\ncell_r1_c1 == o\n").unwrap();
    let o = run(dir.path(), &["train", "--data", "t.csv", "--rules", "r.txt", "--complexity", "8", "--max-degree", "3", "--out", "s"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(field(&out, "mode:"), "soft");
    assert!(out.contains("human rule kept: cell_r0_c0 == x AND cell_r0_c1 == x AND cell_r0_c2 == x"));
    assert!(out.contains("human rule dropped: cell_r1_c1 == o"));
}

#[test]
fn mode_and_input_files_must_match() {
    let dir = with_data();
    std::fs::write(dir.path().join("r.txt"), "cell_r1_c1 == x\n").unwrap();
    let cases: [&[&str]; 3] = [
        &["train", "--data", "t.csv", "--mode", "templates", "--out", "a"],
        &["train", "--data", "t.csv", "--mode", "hard", "--out", "a"],
        &["train", "--data", "t.csv", "--rules", "missing.txt", "--out", "a"],
    ];
    for args in cases {
        assert_eq!(run(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
    let o = run(dir.path(), &["train", "--data", "nope.csv", "--out", "a"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn templates_mode_trains_with_a_distance_penalty() {
    let dir = with_data();
    std::fs::write(dir.path().join("p.txt"), "cell_r1_c1 == x AND cell_r0_c0 == x\n").unwrap();
    let o = run(dir.path(), &["train", "--data", "t.csv", "--templates", "p.txt", "--cp", "1", "--complexity", "6", "--max-degree", "3", "--out", "p"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "mode:"), "templates");
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = with_data();
    std::fs::write(dir.path().join("c.cfg"), "# small run\ncomplexity = 6\nmax-degree = 2\n").unwrap();
    let o = run(dir.path(), &["train", "--data", "t.csv", "--config", "c.cfg", "--complexity", "3", "--out", "c"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(field(&stdout(&o), "complexity:"), "3 / 3");
    let manifest = std::fs::read_to_string(dir.path().join("c/manifest.json")).unwrap();
    assert!(manifest.contains("\"max_degree\": 2"));
    std::fs::write(dir.path().join("bad.cfg"), "colour = red\n").unwrap();
    let o = run(dir.path(), &["train", "--data", "t.csv", "--config", "bad.cfg", "--out", "d"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn iteration_limit_has_its_own_exit_code() {
    let dir = with_data();
    let o = run(dir.path(), &["train", "--data", "t.csv", "--max-iterations", "1", "--out", "i"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(dir.path().join("i/model.json").is_file());
}

#[test]
fn eval_rejects_empty_or_mismatched_data() {
    let dir = with_data();
    assert!(run(dir.path(), &["train", "--data", "t.csv", "--complexity", "3", "--max-degree", "3", "--out", "m"]).status.success());
    std::fs::write(dir.path().join("empty.csv"), "").unwrap();
    let o = run(dir.path(), &["eval", "--model", "m/model.json", "--data", "empty.csv", "--out", "e.csv"]);
    assert_eq!(o.status.code(), Some(3));
    std::fs::write(dir.path().join("other.csv"), "a,x_wins\n1,true\n2,false\n").unwrap();
    let o = run(dir.path(), &["eval", "--model", "m/model.json", "--data", "other.csv", "--out", "e.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn experiment_rows_cover_the_grid_and_repeat_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["experiment", "--fractions", "0.05", "--rule-counts", "0,8", "--seed", "3"];
    let a = run(dir.path(), &[&args[..], &["--out", "a"]].concat());
    assert!(a.status.success(), "{}", stderr(&a));
    let b = run(dir.path(), &[&args[..], &["--out", "b", "--jobs", "1"]].concat());
    assert!(b.status.success());
    let ra = std::fs::read_to_string(dir.path().join("a/results.csv")).unwrap();
    let rb = std::fs::read_to_string(dir.path().join("b/results.csv")).unwrap();
    assert_eq!(ra, rb);
    assert_eq!(ra.lines().count(), 1 + 2 * 5);
    let agg = std::fs::read_to_string(dir.path().join("a/aggregates.csv")).unwrap();
    assert!(agg.lines().any(|l| l.starts_with("0.05,8,accuracy,1,")), "{agg}");
    let manifest = std::fs::read_to_string(dir.path().join("a/manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 3"));
}
