use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use decoupler_core::channels::depolarizing;
use decoupler_core::decoupling::{run_experiment, DecouplingExperiment};
use decoupler_core::tensor::max_entangled;
use decoupler_core::{PureState, SystemLabel};
use serde_json::Value;

fn decoupler(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_decoupler"));
    cmd.args(args).env_remove("DECOUPLER_THREADS");
    if let Some(t) = threads {
        cmd.env("DECOUPLER_THREADS", t);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

/// Runs a mode and returns the exit code, stderr and output directory.
fn run_mode(dir: &Path, mode: &str, body: &str, extra: &[&str]) -> (i32, String, PathBuf) {
    let cfg = write_config(dir, &format!("{mode}-cfg.json"), body);
    let out = dir.join(format!("{mode}-out"));
    let mut args = vec![
        mode,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = decoupler(&args, None);
    (
        o.status.code().unwrap(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
        out,
    )
}

fn report(out: &Path, mode: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join(format!("{mode}.json"))).unwrap()).unwrap()
}

#[test]
fn catalog_lists_builtins() {
    let o = decoupler(&["catalog"], None);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("identity d=2,2"), "{text}");
    for name in [
        "depolarizing",
        "dephasing",
        "erasure",
        "random",
        "max-entangled",
        "maximally-mixed",
        "ghz-like",
    ] {
        assert!(text.contains(name), "{name} missing");
    }
    let dep = text.lines().find(|l| l.contains("depolarizing")).unwrap();
    assert!(dep.contains("kraus=16"), "{dep}");
}

#[test]
fn catalog_follows_config_dims() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, out) = run_mode(dir.path(), "catalog", r#"{"dims":[3,2]}"#, &[]);
    assert_eq!(code, 0);
    let r = report(&out, "catalog");
    let dep = r["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == "depolarizing")
        .unwrap();
    assert_eq!(dep["count"], 36);
    assert_eq!(dep["label"], "depolarizing d=3,2");
}

#[test]
fn unknown_builtin_suggests_names() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"channel":"depolarising","state":"max-entangled","delta":0.0,"samples":10,"seed":1}"#;
    let (code, err, _) = run_mode(dir.path(), "decouple", body, &[]);
    assert_eq!(code, 2);
    assert!(
        err.contains("channel") && err.contains("did you mean `depolarizing`"),
        "{err}"
    );
    let (code, err, _) = run_mode(dir.path(), "entropy", r#"{"state":"bell","delta":0.0}"#, &[]);
    assert_eq!(code, 2);
    assert!(err.contains("known: max-entangled"), "{err}");
}

#[test]
fn validation_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "decouple",
            r#"{"channel":"identity","delta":0.0,"samples":10,"seed":1}"#,
            "state",
        ),
        (
            "rate-region",
            r#"{"channel":"identity","delta":0.0,"sample":3}"#,
            "sample",
        ),
        ("ent-gen", r#"{"channel":"identity","delta":0.0}"#, "epsilon"),
        ("entropy", r#"{"state":"random(1)","delta":1.5}"#, "delta"),
        (
            "decouple",
            r#"{"channel":{"builtin":"random","seeds":2},"state":"max-entangled","delta":0.0,"samples":10,"seed":1}"#,
            "channel.seeds",
        ),
        (
            "decouple",
            r#"{"channel":"identity","state":"max-entangled","dims":[2,2],"k":3,"delta":0.0,"samples":10,"seed":1}"#,
            "k",
        ),
        (
            "rate-region",
            r#"{"channel":"identity","dims":[2,2,2],"delta":0.0}"#,
            "dims",
        ),
        ("twirl-check", r#"{"dims":[2],"seed":1}"#, "samples"),
        (
            "decouple",
            r#"{"mode":"entropy","channel":"identity","state":"max-entangled","delta":0.0,"samples":10,"seed":1}"#,
            "mode",
        ),
    ];
    for (mode, body, field) in cases {
        let (code, err, out) = run_mode(dir.path(), mode, body, &[]);
        assert_eq!(code, 2, "{mode} {body}: {err}");
        assert!(err.contains(field), "{field} not named in: {err}");
        assert!(!out.join(format!("{mode}.json")).exists());
    }
}

#[test]
fn missing_config_and_bad_threads_are_validation_errors() {
    assert_eq!(decoupler(&["decouple"], None).status.code(), Some(2));
    assert_eq!(decoupler(&["catalog"], Some("zero")).status.code(), Some(2));
    assert_eq!(decoupler(&["not-a-mode"], None).status.code(), Some(2));
}

#[test]
fn empty_support_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"channel":{"inputs":[2],"output":2,"kraus":[[[0.1,0],[0,0],[0,0],[0.1,0]]]},
        "dims":[2],"state":"max-entangled","delta":0.5,"samples":20,"seed":1}"#;
    let (code, err, _) = run_mode(dir.path(), "decouple", body, &[]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("numerical"), "{err}");
}

#[test]
fn twirl_check_reports_clt_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err, out) = run_mode(
        dir.path(),
        "twirl-check",
        r#"{"k":2,"dims":[2,2],"samples":10000,"seed":7}"#,
        &[],
    );
    assert_eq!(code, 0, "{err}");
    let r = report(&out, "twirl-check");
    let c = &r["checks"][0];
    let (e, t) = (c["mc_error"].as_f64().unwrap(), c["tolerance"].as_f64().unwrap());
    assert!(e > 0.0 && e <= t);
    assert_eq!(r["pass"], true);
    assert_eq!(c["alphas"].as_array().unwrap().len(), 4);
}

#[test]
fn decouple_depolarizing_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"channel":"depolarizing","state":"max-entangled","delta":0.0,"samples":50,"seed":3}"#;
    let (code, err, out) = run_mode(dir.path(), "decouple", body, &[]);
    assert_eq!(code, 0, "{err}");
    let r = report(&out, "decouple");
    assert!(r["lhs_mean"].as_f64().unwrap().abs() < 1e-12);
    for f in ["rhs_thm1", "rhs_cor1", "rhs_thm3"] {
        assert!(r[f].as_f64().unwrap().is_finite(), "{f}");
    }
    assert_eq!(r["per_term_norms"].as_array().unwrap().len(), 4);

    let senders = vec![SystemLabel::new("A1", 2), SystemLabel::new("A2", 2)];
    let ch = depolarizing(senders, SystemLabel::new("E", 4)).unwrap();
    let phi = max_entangled(&SystemLabel::new("j", 4), &SystemLabel::new("R", 4)).unwrap();
    let systems = vec![
        SystemLabel::new("A1", 2),
        SystemLabel::new("A2", 2),
        SystemLabel::new("R", 4),
    ];
    let rho = PureState::new(systems, phi.amplitudes().clone())
        .unwrap()
        .density();
    let lib = run_experiment(&DecouplingExperiment::new(ch, rho, 0.0, 50, 3).unwrap()).unwrap();
    assert_eq!(r["rhs_thm1"].as_f64().unwrap(), lib.rhs_thm1.unwrap());
    assert_eq!(r["rhs_thm3"].as_f64().unwrap(), lib.rhs_thm3.unwrap());
    assert_eq!(r["lhs_mean"].as_f64().unwrap(), lib.lhs_mean);
}

#[test]
fn identity_rate_region_is_square() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err, out) = run_mode(
        dir.path(),
        "rate-region",
        r#"{"channel":"identity","delta":0.0,"e_a":0,"e_b":0}"#,
        &[],
    );
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(out.join("rate-region.csv")).unwrap();
    assert_eq!(csv, "Q_A,Q_B\n0,0\n1,0\n1,1\n0,1\n");
    let r = report(&out, "rate-region");
    let labels: Vec<&str> = r["constraints"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["label"].as_str().unwrap())
        .collect();
    assert_eq!(
        labels,
        ["Q_A-E_A", "Q_B-E_B", "Q_A-E_A+Q_B-E_B", "Q_A+E_A", "Q_B+E_B"]
    );
}

#[test]
fn seed_override_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"channel":"random(2)","state":"random(3)","delta":0.0,"samples":40,"seed":1}"#;
    let read = |o: &Path| std::fs::read(o.join("decouple.json")).unwrap();
    let (_, _, a) = run_mode(dir.path(), "decouple", body, &["--seed", "9"]);
    let first = read(&a);
    let (_, _, b) = run_mode(dir.path(), "decouple", body, &["--seed", "9"]);
    assert_eq!(first, read(&b));
    let (_, _, c) = run_mode(dir.path(), "decouple", body, &["--seed", "10", "--samples", "41"]);
    let r: Value = serde_json::from_slice(&read(&c)).unwrap();
    assert_eq!(r["seed"], 10);
    assert_eq!(r["samples"], 41);
}

#[test]
fn thread_count_does_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"channel":"random(5)","state":"random(6)","dims":[2,3],"delta":0.02,"samples":300,"seed":4}"#,
    );
    let mut reports = Vec::new();
    for t in ["1", "3"] {
        let out = dir.path().join(format!("t{t}"));
        let o = decoupler(
            &[
                "decouple",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ],
            Some(t),
        );
        assert!(o.status.success());
        reports.push(std::fs::read(out.join("decouple.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}
