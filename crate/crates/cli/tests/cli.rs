use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn weakpb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakpb")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    path(&p).to_string()
}

fn generate_php(dir: &TempDir, pigeons: usize, holes: usize) -> String {
    let out = dir.path().join(format!("php-{pigeons}-{holes}.opb"));
    let o = weakpb(&["generate", "php", "--pigeons", &pigeons.to_string(), "--holes", &holes.to_string(), "--out", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    path(&out).to_string()
}

#[test]
fn unsat_exit_code_and_status_line() {
    let dir = TempDir::new().unwrap();
    let file = generate_php(&dir, 3, 2);
    for strategy in ["gen-res", "rs-both", "partial-rs-reason", "weaken-ineffective-conflict", "multiply-weaken"] {
        let o = weakpb(&["solve", &file, "--strategy", strategy]);
        assert_eq!(o.status.code(), Some(20), "{strategy}");
        let out = stdout(&o);
        assert!(out.lines().any(|l| l == "s UNSATISFIABLE"), "{out}");
        assert!(out.contains(&format!("c strategy {strategy}")));
    }
}

#[test]
fn sat_prints_model() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "one.opb", "* #variable= 3 #constraint= 1\n+2 x1 +1 x2 >= 2 ;\n");
    let o = weakpb(&["solve", &file, "--verify-model"]);
    assert_eq!(o.status.code(), Some(10));
    let out = stdout(&o);
    assert!(out.contains("s SATISFIABLE"));
    let v = out.lines().find(|l| l.starts_with("v ")).expect("model line");
    // the unused third variable still gets a value
    assert_eq!(v.split_whitespace().count(), 4);
    assert!(v.split_whitespace().any(|t| t == "x1"));
}

#[test]
fn malformed_input_reports_position() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "bad.opb", "+1 x1 +1 x2 >= 1 ;\n+1 x1 x2 >= 1 ;\n");
    let o = weakpb(&["solve", &file]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2, column"), "{}", stderr(&o));
}

#[test]
fn objective_rejected_unless_ignored() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "obj.opb", "min: +1 x1 ;\n+1 x1 +1 x2 >= 1 ;\n");
    assert_eq!(weakpb(&["solve", &file]).status.code(), Some(1));
    let o = weakpb(&["solve", &file, "--ignore-objective"]);
    assert_eq!(o.status.code(), Some(10));
    assert!(stderr(&o).contains("objective dropped"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(weakpb(&["solve", "x.opb", "--strategy", "nope"]).status.code(), Some(1));
    assert_eq!(weakpb(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(weakpb(&["solve", "/no/such/file.opb"]).status.code(), Some(1));
    assert_eq!(weakpb(&["--help"]).status.code(), Some(0));
}

#[test]
fn generators_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let php = fs::read_to_string(generate_php(&dir, 4, 3)).unwrap();
    assert!(php.starts_with("* #variable= 12 #constraint= 7\n"), "{php}");

    let gen = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let args = ["generate", "random", "--vars", "9", "--constraints", "5", "--max-weight", "7", "--seed", seed, "--out", path(&out)];
        assert!(weakpb(&args).status.success());
        fs::read(out).unwrap()
    };
    let a = gen("a.opb", "3");
    assert_eq!(a, gen("b.opb", "3"));
    assert_ne!(a, gen("c.opb", "4"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().filter(|l| l.ends_with(';')).count(), 5);
}

#[test]
fn emitted_trace_verifies_and_tampering_is_caught() {
    let dir = TempDir::new().unwrap();
    let file = generate_php(&dir, 4, 3);
    let trace = dir.path().join("php.trace");
    let o = weakpb(&["solve", &file, "--strategy", "partial-rs-both", "--emit-trace", path(&trace)]);
    assert_eq!(o.status.code(), Some(20));

    let o = weakpb(&["verify", &file, "--trace", path(&trace)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("refutation"));

    // bump the degree of the first derived constraint
    let text = fs::read_to_string(&trace).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let k = lines.iter().position(|l| l.starts_with("s ")).expect("a derivation step");
    let (head, degree) = lines[k].rsplit_once(">= ").expect("constraint output");
    let bumped: i64 = degree.trim().parse::<i64>().unwrap() + 1;
    lines[k] = format!("{head}>= {bumped}");
    let tampered = dir.path().join("tampered.trace");
    fs::write(&tampered, lines.join("\n") + "\n").unwrap();
    let o = weakpb(&["verify", &file, "--trace", path(&tampered)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("rejected at entry"), "{}", stdout(&o));
}

#[test]
fn bench_writes_matrix_and_cactus() {
    let dir = TempDir::new().unwrap();
    generate_php(&dir, 3, 2);
    generate_php(&dir, 4, 3);
    let out = TempDir::new().unwrap();
    let csv = out.path().join("run.csv");
    let o = weakpb(&[
        "bench",
        path(dir.path()),
        "--strategies",
        "gen-res,rs-conflict",
        "--timeout",
        "10",
        "--jobs",
        "2",
        "--out",
        path(&csv),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "instance,strategy,status,seconds,conflicts,decisions,propagations,learned,max_coeff_bits,fallbacks");
    assert_eq!(rows.len(), 5);
    assert!(rows[1].starts_with("php-3-2,gen-res,UNSAT,"));
    assert!(rows[4].starts_with("php-4-3,rs-conflict,UNSAT,"));

    let cactus = fs::read_to_string(out.path().join("run.cactus.csv")).unwrap();
    let lines: Vec<&str> = cactus.lines().collect();
    assert_eq!(lines[0], "strategy,solved,seconds");
    assert_eq!(lines.len(), 5);
    assert!(lines[2].starts_with("gen-res,2,"));
}
