use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn dynsamp(args: &[&str]) -> Output {
    let args: Vec<String> = args
        .iter()
        .map(|a| {
            let relative_fixture = (a.ends_with(".json") || a.ends_with(".csv")) && !Path::new(a).is_absolute();
            if relative_fixture {
                fixture(a).display().to_string()
            } else {
                a.to_string()
            }
        })
        .collect();
    Command::new(env!("CARGO_BIN_EXE_dynsamp")).args(&args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn exit_codes_follow_verdicts() {
    let cases: &[(&[&str], i32)] = &[
        (&["check", "--system", "diag_observable.json"], 0),
        (&["check", "--system", "diag_blind.json"], 1),
        (&["check", "--system", "scalar_decay_infinite.json"], 0),
        (&["reconstruct", "--system", "diag_observable.json", "--samples", "diag_observable_samples.csv"], 0),
        (&["reconstruct", "--system", "diag_blind.json", "--samples", "diag_observable_samples.csv"], 1),
        (&["criteria", "--pair", "disc_pass_family.json", "--regime", "disc"], 0),
        (&["criteria", "--pair", "halfplane_pass_family.json", "--regime", "halfplane"], 0),
        (&["mobius", "--pair", "disc_pass_family.json"], 0),
        (&["duality", "--system", "damped_oscillator.json"], 0),
        (&["kalman", "--system", "nilpotent.json"], 0),
        (&["truncation", "--system", "scalar_half.json"], 0),
        (&["bessel-op", "--system", "rotation.json", "--tau", "1"], 1),
        (&["check", "--system", "unstable_infinite.json"], 2),
        (&["check", "--system", "missing.json"], 2),
        (&["check"], 2),
    ];
    for (args, code) in cases {
        let out = dynsamp(args);
        assert_eq!(out.status.code(), Some(*code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(dynsamp(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_report_speaks_both_vocabularies() {
    let v = json(&dynsamp(&["check", "--system", "diag_observable.json"]));
    assert_eq!(v["command"], "check");
    assert_eq!(v["verdict"], true);
    assert!(v["tolerances"]["eob_rel"].is_number());
    let dictionary = v["dictionary"].as_array().unwrap();
    assert!(dictionary.iter().any(|e| e["verdict"] == "frame_eob" && e["systems_language"].is_string()));
}

#[test]
fn scalar_infinite_check_attains_admissibility_bound() {
    let v = json(&dynsamp(&["check", "--system", "scalar_decay_infinite.json"]));
    let c2 = v["frame"]["c2"].as_f64().unwrap();
    assert!((c2 - 0.5).abs() <= 1e-10, "c2 = {c2}");
    assert!(v["tail_certificate"]["ok"].as_bool().unwrap());
}

#[test]
fn reconstruct_recovers_fixture_state() {
    let v = json(&dynsamp(&[
        "reconstruct",
        "--system",
        "diag_observable.json",
        "--samples",
        "diag_observable_samples.csv",
    ]));
    let x0 = v["x0"].as_array().unwrap();
    // y0 = x1 + x2 = 3, y1 = 0.5 x1 + 0.25 x2 = 1
    let expected = [1.0, 2.0];
    for (x, e) in x0.iter().zip(expected) {
        assert!((x[0].as_f64().unwrap() - e).abs() <= 1e-12 && x[1].as_f64().unwrap().abs() <= 1e-12, "{x0:?}");
    }
}

#[test]
fn schema_errors_carry_json_pointers() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            r#"{"dim": 1, "operator": {"kind": "diagonal", "mu_re": [0.5]}, "sampling": {"vectors": [[[1, 0]]]}, "time": {"kind": "discrete_finite", "gamma": "x"}}"#,
            "/time/gamma",
        ),
        (
            r#"{"dim": 2, "operator": {"kind": "diagonal", "mu_re": [0.5, 0.2]}, "sampling": {"vectors": [[[1, 0]]]}, "time": {"kind": "discrete_finite", "gamma": 1}}"#,
            "/sampling/vectors/0",
        ),
        (
            r#"{"dim": 1, "operator": {"kind": "cubic"}, "sampling": {"vectors": [[[1, 0]]]}, "time": {"kind": "discrete_finite", "gamma": 1}}"#,
            "/operator/kind",
        ),
    ];
    for (i, (text, pointer)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("s{i}.json"));
        std::fs::write(&path, text).unwrap();
        let out = dynsamp(&["check", "--system", path.to_str().unwrap()]);
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(2));
        assert!(stderr.contains(&format!("\"{pointer}\"")), "expected {pointer} in {stderr}");
    }
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.tsv");
    let out = dynsamp(&[
        "sweep",
        "--system",
        "scalar_decay.json",
        "--deltas",
        "0.25,0.125",
        "--format",
        "tsv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("delta\tc1\tc2\tc1_ref_gap\tc2_ref_gap\tverdict"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn tolerance_overrides_are_embedded() {
    let v = json(&dynsamp(&["check", "--system", "diag_observable.json", "--tol", "1e-6"]));
    assert_eq!(v["tolerances"]["eob_rel"].as_f64(), Some(1e-6));
    assert_eq!(dynsamp(&["check", "--system", "diag_observable.json", "--tol", "-1"]).status.code(), Some(2));
}
