use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_elcone");
const BUILTIN: &str = "paper-example-7";

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_builtin() {
    let o = run(&["solve", "--builtin", BUILTIN]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("residual-tol"));
    assert!(s.contains("x            [0.53333333"), "{s}");
    assert!(s.contains("u            [0.0, 0.26666666"), "{s}");
}

#[test]
fn solve_from_omega_point_stays_below_it() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = run(&[
        "solve",
        "--builtin",
        BUILTIN,
        "--start",
        "31,31,3,4",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("below start  yes"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["converged"], true);
    assert_eq!(v["below_start"], true);
    assert_eq!(v["direction"], "decreasing");
}

#[test]
fn trace_files_have_one_row_per_iterate() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let json = dir.path().join("t.json");
    let report = dir.path().join("r.json");
    let o = run(&[
        "solve",
        "--builtin",
        BUILTIN,
        "--trace",
        csv.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let iterations = r["iterations"].as_u64().unwrap() as usize;
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,x_1,x_2,u_1,u_2,residual,step_norm");
    assert_eq!(lines.len(), iterations + 2);
    let first: Vec<f64> = lines[2].split(',').skip(1).take(4).map(|t| t.parse().unwrap()).collect();
    assert_eq!(first, vec![0.4, 0.4, 0.0, 7.0 / 30.0]);

    run(&["solve", "--builtin", BUILTIN, "--trace", json.to_str().unwrap()]);
    let t: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(t["rows"].as_array().unwrap().len(), iterations + 1);
}

#[test]
fn zero_map_returns_projection_of_start() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "zero.json",
        r#"{
  "name": "zero",
  "p": 1,
  "q": 2,
  "cone": { "type": "orthant", "dim": 2 },
  "map": { "type": "affine", "matrix": [[0, 0, 0], [0, 0, 0], [0, 0, 0]], "offset": [0, 0, 0] },
  "start": [2, -1, 3]
}"#,
    );
    let o = run(&["solve", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("x            [2.0]") && s.contains("u            [0.0, 3.0]"), "{s}");
}

#[test]
fn non_convergence_and_order_violation_codes() {
    let dir = tempfile::tempdir().unwrap();
    let drift = write(
        dir.path(),
        "drift.json",
        r#"{"name": "drift", "p": 1, "q": 1, "cone": {"type": "orthant", "dim": 1},
            "map": {"type": "affine", "matrix": [[0, 0], [0, 0]], "offset": [-1, 0]}}"#,
    );
    let o = run(&["solve", &drift, "--max-iter", "20"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("max-iter after 20 iterations"));

    let flip = write(
        dir.path(),
        "flip.json",
        r#"{"name": "flip", "p": 1, "q": 1, "cone": {"type": "orthant", "dim": 1},
            "map": {"type": "affine", "matrix": [[2, 0], [0, 2]], "offset": [0, 0]}, "start": [1, 0.5]}"#,
    );
    let o = run(&["solve", &flip]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stdout(&o).contains("monotonicity-violation"));
}

#[test]
fn validation_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let q_mismatch = write(
        dir.path(),
        "q.json",
        r#"{"name": "q", "p": 1, "q": 2, "cone": {"type": "orthant", "dim": 3},
            "map": {"type": "builtin", "id": "paper-example-7"}}"#,
    );
    let o = run(&["solve", &q_mismatch]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("dimension 3 does not match q = 2"), "{}", stderr(&o));

    let bad_weight = write(
        dir.path(),
        "w.json",
        r#"{"name": "w", "p": 2, "q": 1, "cone": {"type": "orthant", "dim": 1},
            "map": {"type": "combination", "terms": [
              {"f": {"type": "lorentz_affine", "d": [1, 0], "beta": 0, "gamma": 0}, "weight": [1, 0.5, 0.7]}]}}"#,
    );
    let o = run(&["solve", &bad_weight]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("x_2 >= ||u|| fails"), "{}", stderr(&o));

    let syntax = write(dir.path(), "s.json", "{\"name\": \"s\",\n \"p\": 1,\n \"q\": true}");
    let o = run(&["solve", &syntax]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("`q`") && stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = run(&["solve", "--builtin", BUILTIN, "--start", "1,2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_and_io_codes() {
    assert_eq!(run(&["solve"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "/nonexistent/problem.json"]).status.code(), Some(8));
}

#[test]
fn verify_points() {
    let o = run(&["verify", "--builtin", BUILTIN, "--point", "31,31,3,4"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("in Omega: PASS") && s.contains("in Gamma: PASS"), "{s}");
    let o = run(&["verify", "--builtin", BUILTIN, "--point", "0,0,0,0"]);
    assert_eq!(o.status.code(), Some(6));
    assert!(stdout(&o).contains("in Omega: FAIL"));
}

#[test]
fn verify_problem_and_suites() {
    let o = run(&["verify", "--builtin", BUILTIN, "--samples", "2000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["verify", "--suite", "duality", "--p", "2", "--q", "2", "--samples", "10000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("contains_m agrees with sampled dual: PASS"));
    assert!(stdout(&o).starts_with("seed 42\n"));
    let o = run(&["verify", "--suite", "projection", "--samples", "2000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("seed 7\n"));
    let o = run(&["verify", "--suite", "isotone", "--p", "3", "--q", "2", "--samples", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["verify", "--suite", "hyperplane", "--p", "3", "--q", "1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let o = run(&[
            "verify",
            "--suite",
            "duality",
            "--samples",
            "3000",
            "--report",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(v["seed"], 42);

    let (c, d) = (dir.path().join("c.csv"), dir.path().join("d.csv"));
    run(&["solve", "--builtin", BUILTIN, "--trace", c.to_str().unwrap()]);
    run(&["solve", "--builtin", BUILTIN, "--trace", d.to_str().unwrap()]);
    assert_eq!(std::fs::read(&c).unwrap(), std::fs::read(&d).unwrap());
}

#[test]
fn reproduce_table() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("rep.json");
    let o = run(&["reproduce", "--report", report.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("0 mismatches"));
    assert!(s.contains("x_1 error ratio, exact, n = 2..30"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn sample_problems_solve() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let o = run(&["solve", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", path.display(), stdout(&o));
        count += 1;
    }
    assert!(count >= 3);
}
