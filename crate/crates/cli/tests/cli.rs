use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const EXAMPLE1: &str = "p wcnf 3 5 6\n1 1 2 0\n1 -1 2 0\n1 -2 0\n1 3 2 0\n1 -3 2 0\n";
const EXAMPLE4: &str = "p wcnf 3 5 9\n1 1 2 0\n1 -1 2 0\n5 -2 0\n9 -3 2 0\n9 3 2 0\n";

fn maxsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxsym"))
        .args(args)
        .env_remove("MAXSYM_TIMEOUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn header_counts(dump: &str) -> (usize, usize) {
    let line = dump.lines().find(|l| l.starts_with("p ")).expect("header");
    let parts: Vec<usize> = line.split_whitespace().skip(2).map(|t| t.parse().unwrap()).collect();
    (parts[0], parts[1])
}

#[test]
fn graph_dump_in_both_modes() {
    let dir = TempDir::new().unwrap();
    let ex1 = write(&dir, "ex1.wcnf", EXAMPLE1);
    let out = maxsym(&["graph", s(&ex1), "--mode", "edge"]);
    assert!(out.status.success());
    assert_eq!(header_counts(&stdout(&out)), (7, 8));
    let out = maxsym(&["graph", s(&ex1)]);
    assert_eq!(header_counts(&stdout(&out)), (11, 12));
}

#[test]
fn edge_mode_rejects_partial_instances() {
    let dir = TempDir::new().unwrap();
    let ex4 = write(&dir, "ex4.wcnf", EXAMPLE4);
    let out = maxsym(&["graph", s(&ex4), "--mode", "edge"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn syms_lists_generators_and_order() {
    let dir = TempDir::new().unwrap();
    let ex1 = write(&dir, "ex1.wcnf", EXAMPLE1);
    let text = stdout(&maxsym(&["syms", s(&ex1), "--order"]));
    assert!(text.contains("(x3 ~x3)"), "{text}");
    assert!(text.contains("(x1 x3)(~x1 ~x3)"), "{text}");
    assert!(text.contains("c group order: 8"), "{text}");

    let asym = write(&dir, "asym.cnf", "p cnf 2 2\n1 0\n1 2 0\n");
    let text = stdout(&maxsym(&["syms", s(&asym)]));
    assert_eq!(text.trim(), "c no nontrivial symmetries");

    let hole = dir.path().join("hole2.wcnf");
    assert!(maxsym(&["gen", "hole", "2", "-o", s(&hole)]).status.success());
    let text = stdout(&maxsym(&["syms", s(&hole), "--order"]));
    assert!(text.contains("c group order: 12"), "{text}");
    let text = stdout(&maxsym(&["syms", s(&hole), "--order", "--order-limit", "5"]));
    assert!(text.contains("c group order: >5"), "{text}");
}

#[test]
fn sbp_writes_augmented_instance() {
    let dir = TempDir::new().unwrap();
    let ex1 = write(&dir, "ex1.wcnf", EXAMPLE1);
    let out_path = dir.path().join("ex1.sbp.wcnf");
    let out = maxsym(&["sbp", s(&ex1), "-o", s(&out_path)]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "#ClsSbp 2");
    let text = fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("p wcnf 3 7 6"), "{text}");
    assert!(text.contains("6 -3 0"), "{text}");
    assert!(text.contains("6 -1 3 0"), "{text}");

    let ex4 = write(&dir, "ex4.wcnf", EXAMPLE4);
    let out = maxsym(&["sbp", s(&ex4)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("#ClsSbp 2"));
    assert!(stdout(&out).contains("p wcnf 3 7 9"));
}

#[test]
fn solve_reports_optimum() {
    let dir = TempDir::new().unwrap();
    let ex1 = write(&dir, "ex1.wcnf", EXAMPLE1);
    let ex4 = write(&dir, "ex4.wcnf", EXAMPLE4);
    for args in [vec!["solve", s(&ex1)], vec!["solve", s(&ex1), "--sbp"], vec!["solve", s(&ex1), "--brute"]] {
        let text = stdout(&maxsym(&args));
        assert!(text.lines().any(|l| l == "o 1"), "{text}");
        assert!(text.contains("s OPTIMUM FOUND"), "{text}");
    }
    let text = stdout(&maxsym(&["solve", s(&ex4), "--sbp"]));
    assert!(text.lines().any(|l| l == "o 5"), "{text}");
    let v = text.lines().find(|l| l.starts_with("v ")).unwrap();
    assert_eq!(v.split_whitespace().count(), 4, "only original variables: {v}");

    let unsat = write(&dir, "unsat.wcnf", "p wcnf 1 3 10\n10 1 0\n10 -1 0\n1 1 0\n");
    let out = maxsym(&["solve", s(&unsat)]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("s UNSATISFIABLE"));
}

#[test]
fn solve_budget_exit_code() {
    let dir = TempDir::new().unwrap();
    let hole = dir.path().join("hole6.wcnf");
    assert!(maxsym(&["gen", "hole", "6", "-o", s(&hole)]).status.success());
    let out = maxsym(&["solve", s(&hole), "--max-nodes", "5"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("s SATISFIABLE") || text.contains("s UNKNOWN"), "{text}");
}

#[test]
fn gen_is_deterministic() {
    let a = stdout(&maxsym(&["gen", "rand", "--seed", "7", "--max-weight", "5", "--hard-fraction", "0.2"]));
    let b = stdout(&maxsym(&["gen", "rand", "--seed", "7", "--max-weight", "5", "--hard-fraction", "0.2"]));
    let c = stdout(&maxsym(&["gen", "rand", "--seed", "8", "--max-weight", "5", "--hard-fraction", "0.2"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("p wcnf 10 20 "));

    let h2 = stdout(&maxsym(&["gen", "hole", "2"]));
    assert!(h2.starts_with("p wcnf 6 9 10\n"), "{h2}");
    let h7 = stdout(&maxsym(&["gen", "hole", "7"]));
    assert!(h7.starts_with("p wcnf 56 204 205\n"));
}

#[test]
fn bench_outputs_csv() {
    let dir = TempDir::new().unwrap();
    let ex1 = write(&dir, "ex1.wcnf", EXAMPLE1);
    let bad = write(&dir, "bad.wcnf", "p wcnf 1 1 5\n7 1 0\n");
    let out = maxsym(&["bench", s(&ex1), s(&bad), "--hole", "3", "--format", "csv", "--workers", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "name,variant,cls_sbp,orig_time,sbp_time,orig_nodes,sbp_nodes");
    assert_eq!(lines.len(), 3, "{text}");
    assert!(lines[1].starts_with("hole3,MS,"));
    assert!(lines[2].contains(",MS,2,"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c error:"));

    let out = maxsym(&["bench", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.wcnf", "");
    assert_eq!(maxsym(&["solve", s(&empty)]).status.code(), Some(2));
    let garbage = write(&dir, "junk.cnf", "p cnf 2 1\n1 x 0\n");
    let out = maxsym(&["syms", s(&garbage)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(maxsym(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(maxsym(&["solve", "/nonexistent/file.wcnf"]).status.code(), Some(1));
    assert_eq!(maxsym(&["--help"]).status.code(), Some(0));
}

#[test]
fn stdin_input() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_maxsym"))
        .args(["solve", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(EXAMPLE4.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(stdout(&out).contains("o 5"));
}
