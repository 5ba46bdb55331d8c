use std::process::Command;
use std::sync::Arc;

use hyperbound::cayley::{build_ball, io};
use hyperbound::experiments::{ExperimentReport, Status};
use hyperbound::group::Preset;
use hyperbound::shift_space::{CarrierFile, SeqModel};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hyperbound"));
    c.env_remove("HYPERBOUND_MAX_VERTICES");
    c
}

#[test]
fn free_shift_audit_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let csv = dir.path().join("table.csv");
    let status = bin()
        .args([
            "audit",
            "free-shift",
            "--preset",
            "f2",
            "--seed",
            "7",
            "--out",
        ])
        .arg(&out)
        .arg("--csv")
        .arg(&csv)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report = ExperimentReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.status(), Status::Pass);
    assert_eq!(report.config.seed, 7);
    assert!(report.timestamp.is_some());
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().count(), 1 + 400);
    // no temporary files left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn build_ball_radius_one() {
    let out = bin()
        .args(["build-ball", "--preset", "f2", "--radius", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["vertices"].as_array().unwrap().len(), 5);
    let ball = io::from_json(&text).unwrap();
    assert_eq!(ball, build_ball(&Arc::new(Preset::F2.oracle()), 1).unwrap());
}

#[test]
fn usage_and_config_errors_exit_two() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(
        code(&["audit", "free-shift", "--preset", "f2", "--bogus"]),
        Some(2)
    );
    assert_eq!(code(&["build-ball"]), Some(2));
    assert_eq!(code(&["build-ball", "--preset", "h7"]), Some(2));
    assert_eq!(code(&["audit", "free-shift", "--preset", "z2z3"]), Some(2));
    assert_eq!(
        code(&["--threads", "0", "build-ball", "--preset", "f2"]),
        Some(2)
    );
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn vertex_cap_from_environment() {
    let run = |cap: &str| {
        bin()
            .env("HYPERBOUND_MAX_VERTICES", cap)
            .args(["build-ball", "--preset", "f2", "--radius", "2"])
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run("17"), Some(0));
    assert_eq!(run("16"), Some(2));
    assert_eq!(run("lots"), Some(2));
}

#[test]
fn asdim_cover_on_carrier_file() {
    let dir = tempfile::tempdir().unwrap();
    let alphabet = Arc::new(Preset::F2.oracle().alphabet().clone());
    let items: Vec<SeqModel> = ["aaaa", "aaa", "aa", "a", ""]
        .iter()
        .map(|w| SeqModel::parse(alphabet.clone(), w).unwrap())
        .collect();
    let path = dir.path().join("carrier.json");
    std::fs::write(&path, CarrierFile::of(&alphabet, &items).to_json().unwrap()).unwrap();
    let out = bin()
        .args(["asdim-cover", "--scale", "1", "--carrier"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["audit"]["max_ball_classes"], 2);
    assert_eq!(json["audit"]["ok_diameter"], true);
}

#[test]
fn presentation_files_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let pres = dir.path().join("z.txt");
    std::fs::write(&pres, "generators: a b\nself: a\norders: b=3\n").unwrap();
    let out = dir.path().join("r.json");
    let status = bin()
        .args([
            "audit",
            "lemma-bound",
            "--eta",
            "ab",
            "--r",
            "2",
            "--depth",
            "6",
            "--horizon",
            "12",
        ])
        .arg("--presentation")
        .arg(&pres)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report = ExperimentReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.measured["per_eta"][0]["points"], 4);
    assert_eq!(report.config.group, pres.display().to_string());
}

#[test]
fn phi_prints_the_lex_least_prefix() {
    let out = bin()
        .args([
            "phi",
            "--preset",
            "z2z3",
            "--eta",
            "ab",
            "--depth",
            "4",
            "--horizon",
            "8",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["sigma"], "abab");
}
