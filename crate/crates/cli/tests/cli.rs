use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

struct Env {
    dir: TempDir,
}

impl Env {
    fn new() -> Self {
        Env {
            dir: TempDir::new().unwrap(),
        }
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

fn qweyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qweyl")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_unit_c_n1_d2() {
    let env = Env::new();
    let p = env.file("p.json", r#"{"n":1,"eps":[[1,2]]}"#);
    let o = qweyl(&["verify", "theorem-b", "--params", path(&p)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("associate, unit -1, Λ=4"), "{out}");
}

#[test]
fn verify_formal_c_l4() {
    let env = Env::new();
    let p = env.file("p.json", r#"{"n":1,"eps":[[1,2]]}"#);
    let o = qweyl(&["verify", "theorem-71", "--params", path(&p), "--L", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("Λ=16, polynomial in c^gcd(L): true"));
}

#[test]
fn assumption_violation_is_input_error() {
    let env = Env::new();
    let p = env.file("p.json", r#"{"n":1,"eps":[[1,1]]}"#);
    assert_eq!(qweyl(&["validate", "--params", path(&p)]).status.code(), Some(2));
}

#[test]
fn malformed_json_reports_location() {
    let env = Env::new();
    let p = env.file("p.json", "{\"n\":1,\n\"eps\":[[1,2]");
    let o = qweyl(&["validate", "--params", path(&p)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_file_and_bad_flags() {
    assert_eq!(qweyl(&["validate", "--params", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(qweyl(&["validate"]).status.code(), Some(2));
    let env = Env::new();
    let p = env.file("p.json", r#"{"n":1,"eps":[[1,2]]}"#);
    let o = qweyl(&["discriminant", "--params", path(&p), "--L", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn is_central() {
    let env = Env::new();
    let p = env.file("p.json", r#"{"n":1,"eps":[[1,2]]}"#);
    let o = qweyl(&["is-central", "--params", path(&p), "--element", "y1^2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "central: true");
    let o = qweyl(&["is-central", "--params", path(&p), "--element", "x1*y1"]);
    assert_eq!(stdout(&o).trim(), "central: false");
    let o = qweyl(&["is-central", "--params", path(&p), "--element", "x1 +* y1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn isomorphism_search() {
    let env = Env::new();
    let a = env.file("a.json", r#"{"n":1,"eps":[[1,3]]}"#);
    let b = env.file("b.json", r#"{"n":1,"eps":[[2,3]]}"#);
    let c = env.file("c.json", r#"{"n":1,"eps":[[1,4]]}"#);
    let o = qweyl(&["isomorphic", "--params", path(&a), "--params2", path(&b)]);
    assert_eq!(stdout(&o).trim(), "isomorphic: tau=[-1]");
    let o = qweyl(&["isomorphic", "--params", path(&a), "--params2", path(&c), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["isomorphic"], false);
}

#[test]
fn aut_check() {
    let env = Env::new();
    let p = env.file("p.json", r#"{"n":2,"eps":[[1,2],[1,2]],"beta":[[1,2,1,4]]}"#);
    let o = qweyl(&["aut-check", "--params", path(&p), "--tau", "1,-1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let q = env.file("q.json", r#"{"n":2,"eps":[[1,2],[1,4]],"beta":[[1,2,1,2]]}"#);
    let o = qweyl(&["aut-check", "--params", path(&q), "--tau", "1,-1"]);
    assert_eq!(o.status.code(), Some(1));
    let spec = env.file(
        "s.json",
        r#"{"source":{"n":1,"eps":[[1,3]]},"target":{"n":1,"eps":[[2,3]]},
            "tau":[-1],"units":["u"],"mu":["u"],"nu":["-e^2/u"]}"#,
    );
    let o = qweyl(&["aut-check", "--spec", path(&spec)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn poisson_and_prop33() {
    let env = Env::new();
    let p = env.file("p.json", r#"{"n":1,"eps":[[1,2]]}"#);
    let o = qweyl(&["poisson", "--params", path(&p), "--f", "X1", "--g", "Y1"]);
    assert_eq!(stdout(&o).trim(), "{X1, Y1} = -4*X1*Y1 + 1");
    let q = env.file("q.json", r#"{"n":2,"eps":[[1,2],[1,4]],"beta":[[1,2,1,2]]}"#);
    let o = qweyl(&["verify", "prop33", "--params", path(&q)]);
    assert_eq!(o.status.code(), Some(0));
    let o = qweyl(&["verify", "specz", "--params", path(&q)]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn deterministic_reports() {
    let env = Env::new();
    let p = env.file("p.json", r#"{"n":1,"eps":[[1,3]]}"#);
    let run = || {
        stdout(&qweyl(&["verify", "theorem-b", "--params", path(&p), "--format", "json", "--no-timing"]))
    };
    assert_eq!(run(), run());
    let run = || stdout(&qweyl(&["acceptance", "--criterion", "2", "--seed", "5", "--format", "json", "--no-timing"]));
    let a = run();
    assert_eq!(a, run());
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["pass"], true);
}
