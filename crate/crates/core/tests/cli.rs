use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const F3: &str = r#"{"ring":{"p":3,"s":1,"precision":16},"matrix":[["0","3"],["1","0"]]}"#;
const F5: &str = r#"{"ring":{"p":3,"s":2,"precision":16},
  "matrix":[["0","3","0","0"],["1","0","0","0"],["0","0","0","1"],["0","0","1","0"]],
  "el":{"m":2,"grading":[0,1,0,1]}}"#;
const ORDINARY: &str = r#"{"ring":{"p":3,"s":1,"precision":16},"matrix":[["1","0"],["0","3"]],"mu":[0,1]}"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn fcrystal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcrystal")).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn slopes(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

#[test]
fn newton_of_the_supersingular_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f3.json", F3);
    let out = fcrystal(&["newton", "--input", &f]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(slopes(&r["newton"]), ["1/2", "1/2"]);
    assert_eq!(r["ring"]["p"], 3);
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert!(r["min_precision"].as_u64().unwrap() <= 16);
}

#[test]
fn domain_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f3.json", F3);
    let out = fcrystal(&["hn-decompose", "--input", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["error"], "NotHNReducible");
}

#[test]
fn precision_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "ord.json", ORDINARY);
    let out = fcrystal(&["decompose", "--input", &f, "--precision", "2"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(report(&out)["error"], "PrecisionExhausted");
}

#[test]
fn parse_and_io_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "typo.json", r#"{"ring":{"p":3,"s":1},"matirx":[["1"]]}"#);
    let out = fcrystal(&["newton", "--input", &f]);
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&out)["message"].as_str().unwrap().contains("matirx"));

    let out = fcrystal(&["newton", "--input", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let out = fcrystal(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decomposition_components_are_valid_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f5.json", F5);
    let out = fcrystal(&["decompose", "--input", &f]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let comps = r["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    for (k, c) in comps.iter().enumerate() {
        let file = write(dir.path(), &format!("c{k}.json"), &c["crystal"].to_string());
        let again = report(&fcrystal(&["newton", "--input", &file]));
        let h = c["height"].as_u64().unwrap() as usize;
        assert_eq!(slopes(&again["newton"]), vec![c["slope"].as_str().unwrap().to_string(); h]);
    }
}

#[test]
fn hn_factors_are_valid_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f5.json", F5);
    let r = report(&fcrystal(&["hn-decompose", "--input", &f]));
    assert_eq!(r["partition"], serde_json::json!([1, 1]));
    for (k, factor) in r["factors"].as_array().unwrap().iter().enumerate() {
        let file = write(dir.path(), &format!("h{k}.json"), &factor["crystal"].to_string());
        let again = report(&fcrystal(&["mu-ordinary", "--input", &file]));
        assert_eq!(again["mu_ordinary"], true);
        assert_eq!(again["nu"], factor["nu"]);
    }
}

#[test]
fn reports_are_deterministic_and_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "ord.json", ORDINARY);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = fcrystal(&["adlv-hn", "--input", &f, "--window", "1", "--output", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let r: Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(r["equal"], true);
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 3);
}

#[test]
fn adlv_reports_window_and_incompleteness() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "ord.json", ORDINARY);
    let r = report(&fcrystal(&["adlv", "--input", &f, "--window", "1"]));
    assert_eq!(r["window"], 1);
    assert_eq!(r["complete_in_window"], false);
    assert_eq!(r["count"].as_u64().unwrap() as usize, r["classes"].as_array().unwrap().len());
}

#[test]
fn el_realize_and_deform_from_types() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "w.json", r#"{"weights":{"dims":[1,1,2],"sigma":[1,0,2]}}"#);
    let r = report(&fcrystal(&["el-realize", "--input", &f]));
    assert_eq!(r["orbits"], serde_json::json!([{"m": 2, "n": 1}, {"m": 1, "n": 2}]));

    let f = write(dir.path(), "t.json", r#"{"types":[{"d":1,"f":[0]},{"d":1,"f":[1]}]}"#);
    let r = report(&fcrystal(&["deform", "--input", &f]));
    assert_eq!(r["f_prime"], serde_json::json!([1]));
    assert_eq!(r["defspace_dim"], 1);

    let f = write(dir.path(), "u.json", r#"{"types":[{"d":1,"f":[1]},{"d":1,"f":[0]}]}"#);
    let out = fcrystal(&["deform", "--input", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["error"], "UncoveredCase");
}

#[test]
fn selftest_exits_cleanly() {
    let out = fcrystal(&["selftest", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["passed"], true);
}
