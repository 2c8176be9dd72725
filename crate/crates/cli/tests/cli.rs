use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const M17: &str = r#"{"kind":"power","r":1.7,"normalize":"default"}"#;

fn orlicz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orlicz")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn norm_of_three_four_is_five() {
    let o = orlicz(&["norm", "--orlicz", r#"{"kind":"power","r":2}"#, "--x", "3,4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "5");
}

#[test]
fn conditions_for_power_above_q() {
    let o = orlicz(&["conditions", "--orlicz", r#"{"kind":"power","r":1.7}"#, "--q", "1.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["pass"], true);
    let c = v["integral"]["constant"].as_f64().unwrap();
    assert!((c - 5.0).abs() < 0.5, "{c}");
}

#[test]
fn failed_condition_exits_one() {
    let o = orlicz(&["conditions", "--orlicz", r#"{"kind":"power","r":1.4}"#, "--q", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn input_errors_exit_two() {
    for args in [
        vec!["embed", "--orlicz", M17, "--q", "1.5"],
        vec!["verify", "lq-generation", "--p", "1.4", "--q", "1.5", "--seed", "1"],
        vec!["norm", "--orlicz", "/nonexistent/m.json", "--x", "1"],
        vec!["norm", "--x", "1"],
        vec!["make-dist", "--orlicz", r#"{"kind":"power","r":2.5,"normalize":"default"}"#, "--p", "2"],
    ] {
        let o = orlicz(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn unknown_config_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    fs::write(&path, r#"{"command":"norm","x":[1],"orlicz":{"kind":"power","r":2},"colour":1}"#).unwrap();
    assert_eq!(orlicz(&["run", "--config", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    fs::write(&path, r#"{"command":"norm","x":[6,8],"orlicz":{"kind":"power","r":2}}"#).unwrap();
    let cfg = path.to_str().unwrap();
    assert_eq!(stdout(&orlicz(&["run", "--config", cfg])).trim(), "10");
    assert_eq!(stdout(&orlicz(&["run", "--config", cfg, "--x", "3,4"])).trim(), "5");
}

#[test]
fn verify_tensor_writes_ratio_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = orlicz(&[
        "verify", "tensor", "--orlicz", M17, "--p", "2", "--q", "1.5", "--ns", "4,8,16", "--seed", "11",
        "--replicates", "20000", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let csv = fs::read_to_string(out.join("ratio.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,estimate,dispersion,predicted,ratio"));
    assert_eq!(lines.count(), 3);
    assert!(!csv.contains('\r'));
}

#[test]
fn stored_config_reproduces_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = orlicz(&[
        "embed", "--orlicz", M17, "--q", "1.5", "--ns", "2,4", "--per-n", "4", "--seed", "5", "--replicates", "4000",
        "--workers", "3", "--out", a.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let stored = a.join("config.json");
    let o = orlicz(&["run", "--config", stored.to_str().unwrap(), "--workers", "1", "--out", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(files(&a), files(&b));
}

#[test]
fn generated_law_maps_back_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let (d, m) = (dir.path().join("d"), dir.path().join("m"));
    let o = orlicz(&["make-dist", "--orlicz", M17, "--p", "2", "--out", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let spec = d.join("distribution.json");
    let o = orlicz(&["make-orlicz", "--distribution", spec.to_str().unwrap(), "--p", "2", "--out", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    // the regenerated function is normalized and reaches 1 where t^1.7 does
    let v = json(&o);
    assert_eq!(v["normalized"], true);
    assert!((v["inverse_at_one"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let grid = fs::read_to_string(m.join("grid.csv")).unwrap();
    for line in grid.lines().skip(1).step_by(64) {
        let (s, val) = line.split_once(',').unwrap();
        let (s, val): (f64, f64) = (s.parse().unwrap(), val.parse().unwrap());
        if s < 1.0 {
            assert!((val / s.powf(1.7) - 1.0).abs() < 1e-4, "s = {s}");
        }
    }
}

#[test]
fn roundtrip_reports_pass() {
    let o = orlicz(&["roundtrip", "--orlicz", M17, "--distribution", r#"{"kind":"pareto_q","q":1.5}"#, "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["m_to_m"]["max_rel_dev"].as_f64().unwrap() <= 1e-4);
    assert!(v["density"]["max_rel_err"].as_f64().unwrap() <= 1e-6);
}
