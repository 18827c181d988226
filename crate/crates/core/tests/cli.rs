use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn atgeo(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atgeo")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn closed_loop_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = atgeo(&["construct", "--kind", "closed-loop", "--k", "0.5", "--out", "loop"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["schedule.json", "etas.json", "loop.json"] {
        assert!(dir.path().join("loop").join(f).exists());
    }
    let o = atgeo(&["certify", "--input", "loop/loop.json", "--points", "0,0.125,0.25,0.375,0.5", "--out", "out"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("out/certify_1.csv")).unwrap();
    assert!(csv.starts_with("anchor,family,s,t,lower,upper,target,status\n"));
    assert_eq!(csv.lines().skip(1).filter(|l| l.ends_with(",CERTIFIED")).count(), 10);
    let o = atgeo(&["certify", "--input", "loop/etas.json", "--out", "dist"], dir.path());
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("dist/distances.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn corrupted_schedule_is_a_hard_failure() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&atgeo(&["construct", "--kind", "kappa", "--out", "."], dir.path())), 0);
    let path = dir.path().join("schedule.json");
    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    doc["content"]["schedule"]["r"][1] = serde_json::json!(0.9);
    doc["content"]["schedule"]["r_gap"][1] = serde_json::json!(1.0 - 0.9);
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = atgeo(&["certify", "--input", "schedule.json", "--out", "out"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("schedule rejected"));
    assert!(dir.path().join("out/schedule_inequalities.csv").exists());
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&atgeo(&["construct", "--kind", "step3", "--out", "."], dir.path())), 0);
    let empty = atgeo(&["certify", "--input", "step3.json", "--points", "--out", "x"], dir.path());
    assert_eq!(code(&empty), 1);
    assert!(String::from_utf8_lossy(&empty.stderr).contains("empty grid"));
    assert_eq!(code(&atgeo(&["certify", "--input", "step3.json", "--grid", "1"], dir.path())), 1);
    assert_eq!(code(&atgeo(&["frobnicate"], dir.path())), 1);
    let bad_k = atgeo(&["construct", "--kind", "kappa", "--k", "1.2"], dir.path());
    assert_eq!(code(&bad_k), 1);
    assert!(String::from_utf8_lossy(&bad_k.stderr).contains("must lie in [0, 1)"));
    let bad_ramp = atgeo(&["construct", "--kind", "step3", "--t0", "0.7"], dir.path());
    assert_eq!(code(&bad_ramp), 1);
    assert_eq!(code(&atgeo(&["--help"], dir.path())), 0);
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&atgeo(&["construct", "--kind", "kappa", "--out", "."], dir.path())), 0);
    let text = fs::read_to_string(dir.path().join("kappa.json")).unwrap();
    fs::write(dir.path().join("typo.json"), text.replacen("\"schema\"", "\"shcema\": 0, \"schema\"", 1)).unwrap();
    let o = atgeo(&["certify", "--input", "typo.json", "--against", "kappa.json"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown field"));
}

#[test]
fn reproduce_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = atgeo(&["reproduce", "--J", "3", "--samples", "2000", "--out", out, "--dat"], dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    }
    let a = fs::read(dir.path().join("a/summary.json")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b/summary.json")).unwrap());
    let line = fs::read_to_string(dir.path().join("a/straight_line.csv")).unwrap();
    assert!(line.lines().skip(1).all(|l| l.starts_with("straight-line,")));
    assert!(dir.path().join("a/straight_line.dat").exists());
    let summary: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(summary["schema"], "atgeo/1");
    assert_eq!(summary["hard_failures"], 0);
}

#[test]
fn families_from_every_kind_certify() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, file, extra) in [
        ("straight-line", "line.json", vec![]),
        ("nonsubstantial", "patch_family.json", vec![]),
        ("infinitesimal", "tangent.json", vec!["--by-patch"]),
        ("modulated", "modulated.json", vec!["--alpha", "1", "--beta", "0.3"]),
    ] {
        let mut args = vec!["construct", "--kind", kind, "--out", kind];
        args.extend(extra);
        assert_eq!(code(&atgeo(&args, dir.path())), 0, "{kind}");
        let input = format!("{kind}/{file}");
        let o = if kind == "modulated" {
            atgeo(&["construct", "--kind", "kappa", "--out", kind], dir.path());
            atgeo(&["certify", "--input", &input, "--against", &format!("{kind}/kappa.json"), "--grid", "5", "--out", "o"], dir.path())
        } else {
            atgeo(&["certify", "--input", &input, "--grid", "5", "--out", "o"], dir.path())
        };
        assert_eq!(code(&o), 0, "{kind}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
