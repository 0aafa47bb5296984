use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polarforge::dataset::io::{encode_pfm, load_plane, save_plane};
use polarforge::dataset::{write_json, ImageFormat};
use polarforge::mosaic::mosaic;
use polarforge::{CpfaPattern, Plane, PolarStack};
use serde_json::Value;

fn polarforge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarforge"))
        .current_dir(dir)
        .env_remove("POLARFORGE_JOBS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = polarforge(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails_with(dir: &Path, args: &[&str], code: i32) -> String {
    let out = polarforge(dir, args);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stderr).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn simulate(dir: &Path, out: &str, extra: &[&str]) -> PathBuf {
    let mut args = vec!["simulate", "--seed", "7", "--size", "64", "--rounds", "1", "--out", out];
    args.extend_from_slice(extra);
    ok(dir, &args);
    dir.join(out).join("manifest.json")
}

#[test]
fn simulate_writes_a_complete_sample() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = simulate(tmp.path(), "d", &[]);
    let m = json(&manifest);
    assert_eq!(m["version"], 1);
    assert_eq!(m["hr_dims"], serde_json::json!([64, 64]));
    assert_eq!(m["lr_dims"], serde_json::json!([32, 32]));
    let d = tmp.path().join("d");
    assert!(d.join("raw.pfm").exists() && d.join("pattern.json").exists());
    for stack in ["gt_hr", "gt_lr"] {
        assert_eq!(std::fs::read_dir(d.join(stack)).unwrap().count(), 12);
    }
}

#[test]
fn simulate_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    simulate(tmp.path(), "a", &["--noise", "0.02"]);
    simulate(tmp.path(), "b", &["--noise", "0.02"]);
    for f in ["raw.pfm", "gt_hr/I045_g.pfm", "gt_lr/I135_b.pfm", "manifest.json"] {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn simulate_batches_into_seed_directories() {
    let tmp = tempfile::tempdir().unwrap();
    let stdout = ok(tmp.path(), &["simulate", "--seed", "3", "--count", "3", "--size", "32", "--out", "batch"]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    for (line, seed) in lines.iter().zip(3..) {
        assert!(line.ends_with(&format!("scene_{seed}/manifest.json")), "{line}");
        assert_eq!(json(&tmp.path().join(line))["scene"]["seed"], seed);
    }
}

#[test]
fn indivisible_size_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let err = fails_with(tmp.path(), &["simulate", "--size", "130", "--rounds", "1", "--out", "x"], 2);
    assert!(err.contains("divisible"), "{err}");
    assert!(!tmp.path().join("x").exists());
}

#[test]
fn reconstruct_methods_write_their_scales() {
    let tmp = tempfile::tempdir().unwrap();
    simulate(tmp.path(), "d", &[]);
    ok(tmp.path(), &["reconstruct", "--manifest", "d/manifest.json", "--method", "pidsr", "--rounds", "1", "--out", "p"]);
    let p = tmp.path().join("p");
    let rec = json(&p.join("reconstruction.json"));
    let scales: Vec<&str> = rec["outputs"].as_array().unwrap().iter().map(|o| o["scale"].as_str().unwrap()).collect();
    assert_eq!(scales, ["1x", "2x"]);
    assert_eq!(load_plane(&p.join("demosaiced/I000_r.pfm"), None).unwrap().dims(), (32, 32));
    assert_eq!(load_plane(&p.join("sr/I000_r.pfm"), None).unwrap().dims(), (64, 64));
    assert!(p.join("derived/sr/aop_g.pfm").exists());

    ok(tmp.path(), &["reconstruct", "--manifest", "d/manifest.json", "--method", "bilinear", "--out", "b"]);
    let b = tmp.path().join("b");
    assert!(b.join("demosaiced").exists());
    assert!(!b.join("sr").exists());
    fails_with(tmp.path(), &["reconstruct", "--manifest", "d/manifest.json", "--method", "bilinear", "--rounds", "1", "--out", "c"], 2);
}

fn constant_stack(h: usize, w: usize) -> PolarStack {
    // s0 = 0.8, p = 0.5, θ = 0.6 rad, identical in every channel
    let (s0, p, t) = (0.8f64, 0.5f64, 0.6f64);
    let s1 = s0 * p * (2.0 * t).cos();
    let s2 = s0 * p * (2.0 * t).sin();
    PolarStack::filled(h, w, [(s0 - s1) / 2.0, (s0 - s2) / 2.0, (s0 + s1) / 2.0, (s0 + s2) / 2.0])
}

#[test]
fn constant_scene_survives_the_cli() {
    let tmp = tempfile::tempdir().unwrap();
    let raw = mosaic(&constant_stack(32, 32), &CpfaPattern::default()).unwrap();
    save_plane(&tmp.path().join("raw.pfm"), raw.plane(), ImageFormat::Pfm).unwrap();
    write_json(&tmp.path().join("pattern.json"), &CpfaPattern::default()).unwrap();
    ok(tmp.path(), &["reconstruct", "--raw", "raw.pfm", "--pattern", "pattern.json", "--rounds", "1", "--out", "r"]);
    for scale in ["demosaiced", "sr"] {
        for c in ["r", "g", "b"] {
            let aop = load_plane(&tmp.path().join(format!("r/derived/{scale}/aop_{c}.pfm")), None).unwrap();
            // planes are stored as f32
            assert!(aop.data().iter().all(|v| (v - 0.6).abs() < 1e-5), "{scale} {c}");
        }
    }
}

#[test]
fn nan_raw_is_a_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let mut plane = Plane::filled(16, 16, 0.4);
    plane.set(5, 6, f64::NAN);
    std::fs::write(tmp.path().join("raw.pfm"), encode_pfm(&plane)).unwrap();
    fails_with(tmp.path(), &["reconstruct", "--raw", "raw.pfm", "--out", "r"], 4);
    assert!(!tmp.path().join("r/reconstruction.json").exists());
}

#[test]
fn eval_of_ground_truth_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    simulate(tmp.path(), "d", &[]);
    ok(tmp.path(), &["eval", "--pred", "d/gt_hr", "--manifest", "d/manifest.json", "--report", "r.json"]);
    let r = json(&tmp.path().join("r.json"));
    assert_eq!(r["version"], 1);
    assert_eq!(r["scale"], "2x");
    let agg = &r["aggregate"];
    for q in ["I0", "I45", "I90", "I135", "S0", "p"] {
        assert_eq!(agg[q]["psnr"]["identical"], true, "{q}");
        assert_eq!(agg[q]["psnr"]["db"], Value::Null);
        assert_eq!(agg[q]["ssim"], 1.0);
    }
    assert_eq!(agg["theta_mae_deg"], 0.0);
}

#[test]
fn eval_aggregates_scenes_by_plain_mean() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["simulate", "--seed", "1", "--count", "2", "--size", "32", "--out", "d"]);
    for s in [1, 2] {
        let m = format!("d/scene_{s}/manifest.json");
        let out = format!("rec_{s}");
        ok(tmp.path(), &["reconstruct", "--manifest", &m, "--out", &out]);
        ok(tmp.path(), &["eval", "--pred", &out, "--report", &format!("single_{s}.json")]);
    }
    ok(tmp.path(), &["eval", "--pred", "rec_1", "--pred", "rec_2", "--report", "both.json"]);
    let both = json(&tmp.path().join("both.json"));
    let a = json(&tmp.path().join("single_1.json"));
    let b = json(&tmp.path().join("single_2.json"));
    let num = |v: &Value| v.as_f64().unwrap();
    let mean_mae = (num(&a["aggregate"]["theta_mae_deg"]) + num(&b["aggregate"]["theta_mae_deg"])) / 2.0;
    assert!((num(&both["aggregate"]["theta_mae_deg"]) - mean_mae).abs() < 1e-12);
    let mean_db = (num(&a["aggregate"]["S0"]["psnr"]["db"]) + num(&b["aggregate"]["S0"]["psnr"]["db"])) / 2.0;
    assert!((num(&both["aggregate"]["S0"]["psnr"]["db"]) - mean_db).abs() < 1e-12);
    assert_eq!(both["aggregate"]["scene_count"], 2);
    assert_eq!(both["scenes"].as_array().unwrap().len(), 2);
}

#[test]
fn eval_rejects_scale_mismatch() {
    let tmp = tempfile::tempdir().unwrap();
    simulate(tmp.path(), "d", &[]);
    ok(tmp.path(), &["reconstruct", "--manifest", "d/manifest.json", "--rounds", "2", "--out", "r"]);
    let err = fails_with(tmp.path(), &["eval", "--pred", "r"], 2);
    assert!(err.contains("4x") && err.contains("2x"), "{err}");
}

#[test]
fn eval_names_a_missing_ground_truth_file() {
    let tmp = tempfile::tempdir().unwrap();
    simulate(tmp.path(), "d", &[]);
    ok(tmp.path(), &["reconstruct", "--manifest", "d/manifest.json", "--out", "r"]);
    std::fs::remove_file(tmp.path().join("d/gt_hr/I045_g.pfm")).unwrap();
    let err = fails_with(tmp.path(), &["eval", "--pred", "r"], 3);
    assert!(err.contains("I045_g.pfm"), "{err}");
}

#[test]
fn experiments_emit_versioned_json_and_csv() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        tmp.path(),
        &["experiment", "err-vs-res", "--sizes", "32,64,128,256", "--report", "evr.json", "--csv", "evr.csv"],
    );
    let evr = json(&tmp.path().join("evr.json"));
    assert_eq!(evr["version"], 1);
    let sizes: Vec<u64> = evr["result"]["entries"].as_array().unwrap().iter().map(|e| e["size"].as_u64().unwrap()).collect();
    assert_eq!(sizes, [32, 64, 128, 256]);
    let csv = std::fs::read_to_string(tmp.path().join("evr.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);

    let out = ok(tmp.path(), &["experiment", "input-quality", "--count", "4", "--size", "32"]);
    let iq: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(iq["config"]["count"], 4);
    let names: Vec<&str> = iq["result"]["arms"].as_array().unwrap().iter().map(|a| a["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["gt-input", "demosaiced-input"]);
    fails_with(tmp.path(), &["experiment", "err-vs-res", "--sizes", "64,32"], 2);
}

#[test]
fn jobs_default_comes_from_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_polarforge"))
        .current_dir(tmp.path())
        .env("POLARFORGE_JOBS", "many")
        .args(["simulate", "--out", "d"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_polarforge"))
        .current_dir(tmp.path())
        .env("POLARFORGE_JOBS", "2")
        .args(["simulate", "--size", "32", "--out", "d"])
        .output()
        .unwrap();
    assert!(out.status.success());
}
