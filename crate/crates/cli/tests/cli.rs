// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn grainflow(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grainflow")).args(args).arg("--out").arg(out).output().expect("spawn grainflow")
}

fn scene(name: &str) -> String {
    format!("{}/../../scenes/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn short_run_writes_frames_report_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let o = grainflow(
        &["--scene", &scene("circle.scene"), "--steps", "20", "--frame-every", "10", "--format", "csv,svg", "--diagnostics", "density,brakke"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["frame_000000.csv", "frame_000010.csv", "frame_000020.svg", "report.jsonl", "diagnostics.json"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let report = std::fs::read_to_string(dir.path().join("report.jsonl")).unwrap();
    assert_eq!(report.lines().count(), 20);
    let last: serde_json::Value = serde_json::from_str(report.lines().last().unwrap()).unwrap();
    assert_eq!(last["step"], 20);
    assert_eq!(last["violations"].as_array().unwrap().len(), 0);
    let diag: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["brakke"]["holds"], true);
    assert!(String::from_utf8_lossy(&o.stdout).contains("no extinction"));
}

#[test]
fn initial_frames_match_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = grainflow(&["--scene", &scene("circle.scene"), "--steps", "0", "--format", "svg"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(dir.path().join("frame_000000.svg")).unwrap(), std::fs::read(golden("circle_frame0.svg")).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let o = grainflow(&["--scene", &scene("voronoi8.scene"), "--steps", "0"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(dir.path().join("frame_000000.csv")).unwrap(), std::fs::read(golden("voronoi8_frame0.csv")).unwrap());
}

#[test]
fn seed_flag_changes_the_generated_scene() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(grainflow(&["--scene", &scene("voronoi8.scene"), "--steps", "0", "--seed", "7"], a.path()).status.success());
    assert!(grainflow(&["--scene", &scene("voronoi8.scene"), "--steps", "0"], b.path()).status.success());
    assert_ne!(std::fs::read(a.path().join("frame_000000.csv")).unwrap(), std::fs::read(b.path().join("frame_000000.csv")).unwrap());
}

#[test]
fn missing_scene_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = grainflow(&["--scene", "/definitely/not/here.scene"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cannot read scene"));
}

#[test]
fn malformed_scene_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scene");
    std::fs::write(&path, "domain torus\nlabels 2\nline y=0.5 left=1 right=3\n").unwrap();
    let o = grainflow(&["--scene", path.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("3:"), "{}", stderr(&o));
}

#[test]
fn infeasible_paper_parameters_name_the_relation() {
    let dir = tempfile::tempdir().unwrap();
    let o = grainflow(&["--scene", &scene("circle.scene"), "--mode", "paper", "--j", "2", "--epsilon", "0.1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("epsilon < j^-6"), "{}", stderr(&o));
}

#[test]
fn bad_flags_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = grainflow(&["--scene", &scene("circle.scene"), "--diagnostics", "nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = grainflow(&["--scene", &scene("circle.scene"), "--steps", "-3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let o = grainflow(&["--scene", &scene("circle.scene"), "--steps", "1"], &blocker);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
