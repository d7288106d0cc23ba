mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{fixture_dir, sample_go_arrivals};

fn orcas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orcas"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn validate_reports_counts() {
    let out = orcas(&["validate", path(&fixture_dir())]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("ok: 8 defects"));

    let out = orcas(&["validate", "/nonexistent/bundle"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn assess_exit_codes_follow_the_gate() {
    let dir = fixture_dir();
    let out = orcas(&["assess", path(&dir)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("defer to BAHAMAS"));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["evidence"]["gate"], "defer-to-BAHAMAS");

    let out = orcas(&["assess", path(&dir), "--confidence-threshold", "0.70"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let out = orcas(&["assess", path(&dir), "--format", "pdf"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("pdf"));
}

#[test]
fn assess_is_byte_identical_and_sequential_agrees() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.json");
    let b = tmp.path().join("b.json");
    let dir = fixture_dir();
    orcas(&["assess", path(&dir), "-o", path(&a)]);
    orcas(&["--sequential", "assess", path(&dir), "-o", path(&b)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let out = orcas(&["report", path(&a)]);
    assert_eq!(out.status.code(), Some(0));
    let direct = orcas(&["assess", path(&dir), "--format", "text"]);
    assert_eq!(out.stdout, direct.stdout);
    assert!(String::from_utf8(out.stdout).unwrap().contains("5.854E-4"));

    let out = orcas(&["report", path(&a), "--format", "json"]);
    assert_eq!(out.stdout, fs::read(&a).unwrap());
    let out = orcas(&["report", path(&a), "--format", "svg"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("<svg"));

    fs::write(&b, "{}").unwrap();
    assert_eq!(orcas(&["report", path(&b)]).status.code(), Some(1));
}

#[test]
fn overrides_change_the_assessment() {
    let dir = fixture_dir();
    let out = orcas(&["assess", path(&dir), "--exclude-modes", "B,D"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        json["probabilities"]["excluded_modes"],
        serde_json::json!(["B", "D"])
    );
    assert_eq!(json["system_kind"], "custom");

    let out = orcas(&["assess", path(&dir), "--matrix", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("nonexistent.json"));
}

#[test]
fn causality_build_writes_a_matrix() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus.json");
    fs::write(
        &corpus,
        r#"[{"id": "1", "description": "", "class": "timing", "observed_modes": ["C"]},
            {"id": "2", "description": "", "class": "timing", "observed_modes": ["A", "C"]}]"#,
    )
    .unwrap();
    let out_path = tmp.path().join("m.json");
    let out = orcas(&["causality", "build", path(&corpus), "-o", path(&out_path)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m: orcas::causality::CausalityMatrix =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    let row = m.row(orcas::domain::DefectClass::Timing).unwrap();
    assert_eq!(*row, [1.0 / 3.0, 0.0, 2.0 / 3.0, 0.0]);

    fs::write(
        &corpus,
        r#"[{"id": "1", "description": "", "class": "timing"}]"#,
    )
    .unwrap();
    let out = orcas(&["causality", "build", path(&corpus)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn srgm_fit_emits_curve_and_stability() {
    let tmp = tempfile::tempdir().unwrap();
    let history = tmp.path().join("h.json");
    let events = sample_go_arrivals(100.0, 0.01, 400.0, 5);
    fs::write(
        &history,
        serde_json::json!({"events": events, "horizon": 400.0, "unit": "hours"}).to_string(),
    )
    .unwrap();
    let out = orcas(&[
        "srgm",
        "fit",
        path(&history),
        "--stability-windows",
        "4",
        "--curve-samples",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["fit"]["params"]["model"], "goel-okumoto");
    assert_eq!(json["curve"].as_array().unwrap().len(), 10);
    assert!(json["stability"]["fits"].is_array());

    let out = orcas(&["srgm", "fit", path(&history), "--model", "mo"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    fs::write(&history, "[5.0]").unwrap();
    assert_eq!(
        orcas(&["srgm", "fit", path(&history)]).status.code(),
        Some(1)
    );
}

#[test]
fn convert_defects_round_trips_into_a_bundle() {
    let tmp = tempfile::tempdir().unwrap();
    for f in ["effort.json", "rtm.json", "tca.json", "config.json"] {
        fs::copy(fixture_dir().join(f), tmp.path().join(f)).unwrap();
    }
    let csv = tmp.path().join("d.csv");
    fs::write(
        &csv,
        "id,description,class,detection_effort,observed_modes,resolution\n\
         D1,overflow,algorithm,12.5,A;C,fixed\n\
         D2,missing guard,checking,,,\n",
    )
    .unwrap();
    let defects = tmp.path().join("defects.json");
    let out = orcas(&["convert-defects", path(&csv), "-o", path(&defects)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        orcas(&["validate", path(tmp.path())]).status.code(),
        Some(0)
    );

    fs::write(&csv, "id,description,class\nD1,x,spelling\n").unwrap();
    let out = orcas(&["convert-defects", path(&csv)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("spelling"));
}
