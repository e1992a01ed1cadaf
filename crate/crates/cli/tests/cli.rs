use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SPEC: &str = r#"{"r":2,"N":2,"d":1,"m":{"bases":[{"re":"2"}]},
 "a":[{"mu":[1,0],"fn":{"gen_values":[{"re":"1"}]}},
      {"mu":[0,1],"fn":{"gen_values":[{"re":"0","im":"1"}]}},
      {"mu":[2,0],"fn":{"gen_values":[{"re":"-1/2"}]}},
      {"mu":[1,1],"fn":{"gen_values":[{"re":"3"}]}},
      {"mu":[0,2],"fn":{"gen_values":[{"re":"1"}]}}]}"#;

fn bellmoment(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellmoment"))
        .args(args)
        .env_remove("BELLMOMENT_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Workdir {
    dir: TempDir,
}

impl Workdir {
    fn new() -> Self {
        let w = Workdir {
            dir: tempfile::tempdir().unwrap(),
        };
        fs::write(w.path("spec.json"), SPEC).unwrap();
        w
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn tabulate(&self, spec: &str, radius: &str, out: &str) {
        let o = bellmoment(&["construct", p(&self.path(spec)), "--tabulate", radius, "--out", p(&self.path(out))]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&fs::read_to_string(self.path(name)).unwrap()).unwrap()
    }

    fn edit(&self, from: &str, to: &str, f: impl FnOnce(&mut Value)) {
        let mut v = self.json(from);
        f(&mut v);
        fs::write(self.path(to), v.to_string()).unwrap();
    }
}

#[test]
fn mbell_prints_pair_subscripts() {
    let o = bellmoment(&["mbell", "1,1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "x_{0,1}*x_{1,0} + x_{1,1}\n");
}

#[test]
fn bell_latex_row() {
    let o = bellmoment(&["bell", "3", "--format", "latex"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "B_{3}(x_{1},x_{2},x_{3})=x_{1}^{3}+3x_{1}x_{2}+x_{3}\n");
}

#[test]
fn mbell_cross_checks_agree() {
    let o = bellmoment(&["mbell", "4", "--check-gf", "--check-aczel", "--check-addition"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).matches(": agree").count(), 3);
    let o = bellmoment(&["mbell", "1,2", "--check-gf", "--check-addition", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert!(!stdout(&o).contains("false"));
}

#[test]
fn aczel_check_rejects_rank_two() {
    assert_eq!(code(&bellmoment(&["mbell", "1,1", "--check-aczel"])), 2);
}

#[test]
fn construct_then_verify_passes_and_is_reproducible() {
    let w = Workdir::new();
    w.tabulate("spec.json", "3", "t.json");
    let first = bellmoment(&["verify", p(&w.path("t.json")), "--format", "json"]);
    assert_eq!(code(&first), 0);
    let report: Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(report["status"], "pass");
    assert_eq!(report["exhaustive"], true);
    let second = bellmoment(&["verify", p(&w.path("t.json")), "--format", "json"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn sampled_verification_depends_only_on_seed() {
    let w = Workdir::new();
    // 81 points: the l = 4 tuples exceed the exhaustive limit
    w.tabulate("spec.json", "40", "t.json");
    let o = bellmoment(&["project", p(&w.path("t.json")), "--keep", "1", "--out", p(&w.path("p.json"))]);
    assert_eq!(code(&o), 0);
    let run = |seed: &str| {
        bellmoment(&["verify", p(&w.path("p.json")), "--l", "4", "--budget", "300", "--seed", seed, "--format", "json"])
    };
    let a = run("7");
    assert_eq!(code(&a), 0, "{}", stdout(&a));
    assert_eq!(a.stdout, run("7").stdout);
    let report: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report["exhaustive"], false);
}

#[test]
fn zero_tables_report_zero() {
    let w = Workdir::new();
    w.tabulate("spec.json", "2", "t.json");
    w.edit("t.json", "zero.json", |v| {
        for m in v["members"].as_array_mut().unwrap() {
            for e in m["table"]["values"].as_array_mut().unwrap() {
                e["v"] = serde_json::json!({"re": "0"});
            }
        }
    });
    let o = bellmoment(&["verify", p(&w.path("zero.json"))]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("status: zero"));
}

#[test]
fn perturbed_tables_fail_and_do_not_reconstruct() {
    let w = Workdir::new();
    w.tabulate("spec.json", "2", "t.json");
    w.edit("t.json", "bad.json", |v| {
        v["members"][4]["table"]["values"][3]["v"] = serde_json::json!({"re": "11/3"});
    });
    let o = bellmoment(&["verify", p(&w.path("bad.json"))]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("status: fail"));
    let o = bellmoment(&["reconstruct", p(&w.path("bad.json")), "--format", "json"]);
    assert_eq!(code(&o), 1);
    let diag: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(diag["status"], "not_moment_sequence");
}

#[test]
fn reconstruct_recovers_the_spec() {
    let w = Workdir::new();
    w.tabulate("spec.json", "2", "t.json");
    let o = bellmoment(&["reconstruct", p(&w.path("t.json")), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let got: Value = serde_json::from_str(&stdout(&o)).unwrap();
    // compare tabulations: the additive family is only fixed up to its values
    fs::write(w.path("got.json"), got.to_string()).unwrap();
    w.tabulate("got.json", "2", "t2.json");
    assert_eq!(w.json("t.json"), w.json("t2.json"));
    assert_eq!(got["m"]["bases"][0]["re"], "2");
}

#[test]
fn collapse_of_spec_and_of_tables_agree() {
    let w = Workdir::new();
    w.tabulate("spec.json", "2", "t.json");
    let o = bellmoment(&["collapse", p(&w.path("spec.json")), "--out", p(&w.path("c.json"))]);
    assert_eq!(code(&o), 0);
    w.tabulate("c.json", "2", "ct.json");
    let o = bellmoment(&["collapse", p(&w.path("t.json")), "--out", p(&w.path("tc.json"))]);
    assert_eq!(code(&o), 0);
    assert_eq!(w.json("ct.json"), w.json("tc.json"));
    let o = bellmoment(&["verify", p(&w.path("tc.json")), "--l", "3"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn projection_keeps_one_based_coordinates() {
    let w = Workdir::new();
    let o = bellmoment(&["project", p(&w.path("spec.json")), "--keep", "2"]);
    assert_eq!(code(&o), 0);
    let spec: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(spec["r"], 1);
    // a_(1) of the projection is a_(0,1) = i
    assert_eq!(spec["a"][0]["fn"]["gen_values"][0]["im"], "1");
    assert_eq!(code(&bellmoment(&["project", p(&w.path("spec.json")), "--keep", "0"])), 2);
}

#[test]
fn normalize_makes_the_exponential_trivial() {
    let w = Workdir::new();
    w.tabulate("spec.json", "2", "t.json");
    let o = bellmoment(&["normalize", p(&w.path("t.json")), "--out", p(&w.path("n.json"))]);
    assert_eq!(code(&o), 0);
    let o = bellmoment(&["reconstruct", p(&w.path("n.json")), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let spec: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(spec["m"]["bases"][0]["re"], "1");
}

#[test]
fn malformed_json_reports_position() {
    let w = Workdir::new();
    fs::write(w.path("broken.json"), "{\"r\": 1,\n \"N\": }").unwrap();
    let o = bellmoment(&["verify", p(&w.path("broken.json"))]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2 column"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&bellmoment(&["bell", "x"])), 2);
    assert_eq!(code(&bellmoment(&["frobnicate"])), 2);
    let w = Workdir::new();
    assert_eq!(code(&bellmoment(&["verify", p(&w.path("spec.json"))])), 2);
    assert_eq!(code(&bellmoment(&["verify", p(&w.path("missing.json"))])), 2);
}
