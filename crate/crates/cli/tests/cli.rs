use std::fs;
use std::path::PathBuf;

use pso_cli::{run_args, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("pso-cli-{}-{name}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn path(&self, file: &str) -> String {
        self.0.join(file).to_string_lossy().into_owned()
    }

    fn json(&self, file: &str) -> Value {
        serde_json::from_str(&fs::read_to_string(self.0.join(file)).unwrap()).unwrap()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn pso(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_args(std::iter::once("pso").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ex3_matrix(s: &Scratch) -> String {
    let k = s.path("k3.json");
    let p = s.path("p3.json");
    assert_eq!(pso(&["examples", "--name", "ex3", "--m", "3", "--truncate", "6", "--out", &k]).0, EXIT_OK);
    assert_eq!(pso(&["quadrature", &k, "--out", &p]).0, EXIT_OK);
    p
}

#[test]
fn examples_kernel_files() {
    let s = Scratch::new("examples");
    let k = s.path("k.json");
    assert_eq!(pso(&["examples", "--name", "ex3", "--m", "3", "--truncate", "6", "--out", &k]).0, EXIT_OK);
    assert_eq!(s.json("k.json")["a"].as_array().unwrap().len(), 6);
    let k1 = s.path("k1.json");
    assert_eq!(pso(&["examples", "--name", "ex1", "--m", "3", "--truncate", "4", "--normalize", "--out", &k1]).0, EXIT_OK);
    assert_eq!(s.json("k1.json")["normalize"], Value::Bool(true));
    assert_eq!(pso(&["examples", "--name", "foo"]).0, EXIT_USAGE);
}

#[test]
fn quadrature_exit_codes() {
    let s = Scratch::new("quadrature");
    ex3_matrix(&s);
    assert_eq!(s.json("p3.json")["audit"]["violations"].as_array().unwrap().len(), 0);
    let k1 = s.path("k1.json");
    pso(&["examples", "--name", "ex1", "--m", "2", "--truncate", "4", "--out", &k1]);
    let (code, _, _) = pso(&["quadrature", &k1, "--out", &s.path("p1.json")]);
    assert_eq!(code, EXIT_FAILED);
    assert!(!s.json("p1.json")["audit"]["violations"].as_array().unwrap().is_empty());
    assert_eq!(pso(&["quadrature", &s.path("missing.json")]).0, EXIT_USAGE);
}

#[test]
fn check_reports() {
    let s = Scratch::new("check");
    let p = ex3_matrix(&s);
    let out = s.path("c.json");
    assert_eq!(pso(&["check", &p, "--op", "--surjective", "--no-timestamp", "--out", &out]).0, EXIT_OK);
    let r = &s.json("c.json")["result"];
    assert_eq!(r["op"]["is_op"], Value::Bool(true));
    assert_eq!(r["surjective"]["verdict"], "certified_surjective");
    assert_eq!(r["surjective"]["witness"]["sequence"], serde_json::json!([1, 2, 3, 4, 5, 6]));

    let merge = s.path("merge.json");
    assert_eq!(pso(&["examples", "--name", "merge", "--m", "3", "--truncate", "6", "--out", &merge]).0, EXIT_OK);
    assert_eq!(pso(&["check", &merge, "--op"]).0, EXIT_FAILED);
    assert_eq!(pso(&["check", &merge, "--surjective", "--target-dim", "5"]).0, EXIT_OK);

    let no_diag = s.path("nd.json");
    fs::write(
        &no_diag,
        r#"{"m": 2, "dim": 2, "entries": [
            {"idx": [1, 1], "k": 2, "p": 1.0},
            {"idx": [1, 2], "k": 2, "p": 1.0},
            {"idx": [2, 2], "k": 2, "p": 1.0}]}"#,
    )
    .unwrap();
    let (code, text, _) = pso(&["check", &no_diag, "--surjective", "--no-timestamp"]);
    assert_eq!(code, EXIT_FAILED);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["result"]["surjective"]["verdict"], "certified_not_surjective");
}

#[test]
fn apply_preimage_and_solve() {
    let s = Scratch::new("apply");
    let p = ex3_matrix(&s);
    let (code, text, _) = pso(&["apply", &p, "0.5,0.5,0,0,0,0", "--no-timestamp"]);
    assert_eq!(code, EXIT_OK);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["result"]["image"]["coords"], serde_json::json!([0.125, 0.875, 0.0, 0.0, 0.0, 0.0]));

    let (code, text, _) = pso(&["preimage", &p, "0.125,0.875,0,0,0,0", "--no-timestamp"]);
    assert_eq!(code, EXIT_OK);
    let doc: Value = serde_json::from_str(&text).unwrap();
    let x = doc["result"]["preimage"]["x"]["coords"].as_array().unwrap();
    assert!((x[0].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert!(doc["result"]["preimage"]["residual"].as_f64().unwrap() < 1e-10);

    let phi = r#"{"r": 1.0, "weights": [1, 0, 0, 0, 0, 0], "witness": [1, 2, 3, 4, 5, 6]}"#;
    let (code, text, _) = pso(&["solve", &s.path("k3.json"), phi, "--no-timestamp"]);
    assert_eq!(code, EXIT_OK);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["result"]["solution"]["x"]["weights"], serde_json::json!([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));

    assert_eq!(pso(&["apply", &p, "0.5,0.5"]).0, EXIT_USAGE);
    assert_eq!(pso(&["apply", &p, "0.5,0.5,0,0,0,0", "--truncate", "4"]).0, EXIT_USAGE);
}

#[test]
fn iterate_writes_csv() {
    let s = Scratch::new("iterate");
    let p = ex3_matrix(&s);
    let csv = s.path("t.csv");
    assert_eq!(pso(&["iterate", &p, "0.5,0.5,0,0,0,0", "--steps", "3", "--csv", &csv]).0, EXIT_OK);
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("step,x1,x2,x3,x4,x5,x6\n0,0.5,0.5,"));
}

#[test]
fn reruns_are_byte_identical() {
    let s = Scratch::new("determinism");
    let p = ex3_matrix(&s);
    for args in [
        vec!["fixed-points", p.as_str()],
        vec!["check", p.as_str()],
        vec!["preimage", p.as_str(), "0.1,0.2,0.3,0.4,0,0"],
    ] {
        let a = s.path("a.json");
        let b = s.path("b.json");
        let mut first = args.clone();
        first.extend(["--no-timestamp", "--out", &a]);
        let mut second = args.clone();
        second.extend(["--no-timestamp", "--out", &b]);
        assert_eq!(pso(&first).0, EXIT_OK);
        assert_eq!(pso(&second).0, EXIT_OK);
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{args:?}");
    }
    let (_, text, _) = pso(&["check", &p]);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert!(doc["generated_at"].is_u64());
}
