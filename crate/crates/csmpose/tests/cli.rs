use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use csmpose::image_io::{read_labels, write_labels, write_rgb};
use csmpose::run_dir::{read_manifest, SkeletonDoc};
use csmpose_core::puppet::{joint_angles, PuppetSpec, Schedule};
use sha2::{Digest, Sha256};

fn csmpose(args: &[&str]) -> Output {
    csmpose_env(args, &[])
}

fn csmpose_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_csmpose"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("run csmpose")
}

fn ok(out: Output) -> Output {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Relative path → SHA-256 of every file below `dir`.
fn hashes(dir: &Path) -> BTreeMap<PathBuf, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let digest = Sha256::digest(std::fs::read(&p).unwrap());
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), format!("{digest:x}"));
            }
        }
    }
    out
}

fn short_spec(dir: &Path, mut spec: PuppetSpec, frames: usize) -> PathBuf {
    spec.frames = frames;
    let p = dir.join("puppet.json");
    std::fs::write(&p, serde_json::to_string(&spec).unwrap()).unwrap();
    p
}

/// synth + init for a sequence; returns (synth dir, model path).
fn prepared(dir: &Path, spec: PuppetSpec, frames: usize) -> (PathBuf, PathBuf) {
    let spec_path = short_spec(dir, spec, frames);
    let seq = dir.join("seq");
    ok(csmpose(&["synth", "--spec", s(&spec_path), "--out", s(&seq)]));
    let model = dir.join("model.json");
    ok(csmpose(&[
        "init",
        "--frame",
        s(&seq.join("frames/frame_00000.png")),
        "--mask",
        s(&seq.join("masks/frame_00000.png")),
        "--config",
        s(&seq.join("config.json")),
        "--out",
        s(&model),
    ]));
    (seq, model)
}

#[test]
fn still_pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let (seq, model) = prepared(dir.path(), PuppetSpec::still(), 4);
    let run = dir.path().join("run");
    let pattern = seq.join("frames/frame_%05d.png");
    ok(csmpose(&["track", "--model", s(&model), "--frames", s(&pattern), "--range", "0..4", "--out", s(&run), "--dump-flow"]));

    let m = read_manifest(&run).unwrap();
    assert_eq!((m.frame_count, m.divergences), (4, 0));
    assert_eq!(m.parts.len(), 6);
    assert!(m.frames.iter().all(|f| f.seconds.is_none()));
    let mut torso = Vec::new();
    for f in &m.frames {
        assert!(read_labels(&run.join(&f.mask)).is_ok());
        let doc: SkeletonDoc = serde_json::from_str(&std::fs::read_to_string(run.join(&f.skeleton)).unwrap()).unwrap();
        torso.push(doc.skeleton.joint("torso_center").unwrap());
    }
    for t in &torso {
        assert!(t.distance(torso[0]) < 1.0, "torso moved to {t:?} from {:?}", torso[0]);
    }
    let scores = std::fs::read_to_string(run.join("scores.csv")).unwrap();
    assert_eq!(scores.lines().count(), 5);
    assert!(scores.starts_with("frame,diverged,score_torso,score_head,"));
    assert!(!run.join("flow/frame_00000.flow").exists());
    let flow = std::fs::read(run.join("flow/frame_00001.flow")).unwrap();
    assert_eq!(&flow[..8], b"CSMFLOW1");
    assert_eq!(flow.len(), 16 + 320 * 240 * 8);

    let out = dir.path().join("analysis");
    ok(csmpose(&["analyze", "--run", s(&run), "--out", s(&out)]));
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["SS"], 0.0);
    assert_eq!(summary["DS"], 0.0);
    assert_eq!(summary["window_size"], 15);
    assert_eq!(summary["thresholds"]["tau_deg"], 45.0);
    let csv = std::fs::read_to_string(out.join("asymmetry.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "frame,u_l,u_r,e_l,e_r,f_l,f_r,AS_u,AS_f,AS_star,AD_f,asymmetric,evaluable");
    assert_eq!(csv.lines().count(), 5);
    for plot in ["as_star.svg", "forearm_angles.svg"] {
        let text = std::fs::read_to_string(out.join(plot)).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap();
        let lines = doc.descendants().filter(|n| n.has_tag_name("polyline")).count();
        assert!(lines >= 2, "{plot} has {lines} polylines");
        assert!(doc.descendants().any(|n| n.attribute("class") == Some("threshold")));
    }
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let (seq, model) = prepared(dir.path(), PuppetSpec::still(), 2);
    let run = dir.path().join("run");
    let pattern = seq.join("frames/frame_%05d.png");
    ok(csmpose(&["track", "--model", s(&model), "--frames", s(&pattern), "--range", "0..=1", "--out", s(&run), "--timing"]));
    assert!(read_manifest(&run).unwrap().frames.iter().all(|f| f.seconds.is_some()));
}

#[test]
fn init_reports_the_model_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (seq, model) = prepared(dir.path(), PuppetSpec::still(), 1);
    let first = hashes(dir.path());
    let out = ok(csmpose(&[
        "init",
        "--frame",
        s(&seq.join("frames/frame_00000.png")),
        "--mask",
        s(&seq.join("masks/frame_00000.png")),
        "--config",
        s(&seq.join("config.json")),
        "--out",
        s(&model),
    ]));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("6 nodes and 5 edges"), "{stdout}");
    assert!(stdout.contains("left_elbow"));
    assert_eq!(hashes(dir.path()), first);
}

#[test]
fn mask_missing_a_part_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = PuppetSpec::still().render(0).unwrap();
    let (frame, mask) = (dir.path().join("f.png"), dir.path().join("m.png"));
    write_rgb(&frame, &f.image).unwrap();
    write_labels(&mask, &f.labels.map(|&l| if l == 6 { 0 } else { l })).unwrap();
    let out = csmpose(&["init", "--frame", s(&frame), "--mask", s(&mask), "--out", s(&dir.path().join("m.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("right_forearm"));
}

#[test]
fn wrong_video_diverges_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let spec = PuppetSpec::still();
    let (_, model) = prepared(dir.path(), spec.clone(), 1);
    for k in 0..3 {
        write_rgb(&dir.path().join(format!("empty/{k}.png")), &spec.background()).unwrap();
    }
    let run = dir.path().join("run");
    let pattern = dir.path().join("empty/%d.png");
    let out = ok(csmpose(&["track", "--model", s(&model), "--frames", s(&pattern), "--range", "0..3", "--out", s(&run)]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning: 3 of 3 frames diverged"));
    let m = read_manifest(&run).unwrap();
    assert_eq!(m.divergences, 3);
    assert!(m.frames.iter().all(|f| f.diverged));
}

#[test]
fn synth_is_deterministic_and_static_frames_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let spec = short_spec(dir.path(), PuppetSpec::still(), 3);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(csmpose(&["synth", "--spec", s(&spec), "--out", s(&a)]));
    ok(csmpose(&["synth", "--spec", s(&spec), "--out", s(&b)]));
    assert_eq!(hashes(&a), hashes(&b));
    let h = hashes(&a.join("frames"));
    let distinct: std::collections::BTreeSet<_> = h.values().collect();
    assert_eq!((h.len(), distinct.len()), (3, 1));
}

#[test]
fn synth_elbow_series_is_the_planted_sinusoid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("seq");
    ok(csmpose(&["synth", "--spec", "tracking", "--out", s(&out)]));
    let spec = PuppetSpec::tracking();
    let Schedule::Sine { amplitude, hz, .. } = spec.motion.left_elbow else { panic!("sinusoidal elbow") };
    let csv = std::fs::read_to_string(out.join("angles.csv")).unwrap();
    assert_eq!(csv.lines().count(), 61);
    for (k, line) in csv.lines().skip(1).enumerate() {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let t = k as f64 / spec.fps;
        let expected = amplitude * (2.0 * std::f64::consts::PI * hz * t).sin();
        assert!((cols[5] - expected).abs() < 1e-9, "frame {k}: {} vs {expected}", cols[5]);
        let f = spec.render(k).unwrap();
        let gt = joint_angles(&f.skeleton).into_iter().find(|(n, _)| n == "left_elbow").unwrap().1;
        assert!((gt.to_degrees().abs() - expected.abs()).abs() < 1e-9, "frame {k}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(csmpose(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(csmpose(&["track", "--model", "m.json"]).status.code(), Some(1));
    assert_eq!(csmpose(&["--help"]).status.code(), Some(0));
    assert_eq!(csmpose(&["synth", "--spec", "no-such-preset", "--out", "x"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let track = |range: &str, env: &[(&str, &str)]| {
        csmpose_env(&["track", "--model", s(&missing), "--frames", "f_%d.png", "--range", range, "--out", s(dir.path())], env)
            .status
            .code()
    };
    assert_eq!(track("0..4", &[]), Some(2));
    assert_eq!(track("4..1", &[]), Some(1));
    assert_eq!(track("0..4", &[("CSMPOSE_THREADS", "zero")]), Some(1));
    assert_eq!(csmpose(&["analyze", "--run", s(dir.path()), "--out", s(&dir.path().join("o"))]).status.code(), Some(2));
}
