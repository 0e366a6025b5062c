use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SMALL_CONFIG: &str = "\
grid_counts = 6, 6
sup_grid = 200000
ou_k = -1, 0, 2
ou_d = 1, pi
ou_exact_d = 2
ou_m = 400
circle_n = 200
circle_radii = 1
sphere_subdivisions = 3
sphere_heights = 0, 0.5
al_points = 2048
shrinker_circle_points = 200
soliton_samples = 5
";

fn witten_gap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_witten-gap"))
        .args(args)
        .env_remove("WITTEN_GAP_OUT")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn bounds_point_report() {
    let out = witten_gap(&["bounds", "--K", "1", "--d", "3.14159265"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let sup = v["bounds"]["sup_closed"].as_f64().unwrap();
    // interior branch: (π/d + K d/(4π))² with d ≈ π
    let d: f64 = "3.14159265".parse().unwrap();
    let oracle = (std::f64::consts::PI / d + d / (4.0 * std::f64::consts::PI)).powi(2);
    assert!((sup - oracle).abs() < 1e-12 && (sup - 1.5625).abs() < 1e-7, "{sup}");
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pass"], true);
}

#[test]
fn bounds_soliton_and_grid() {
    let out = witten_gap(&["bounds", "--lambda", "1", "--soliton"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["computed"]["optimized_gt_andrews_ni"], 1.0);
    assert_eq!(v["computed"]["andrews_ni_gt_futaki_sano"], 1.0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = witten_gap(&["bounds", "--grid", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "K,d,Kd2,branch,sup_closed,futaki_sano,andrews_ni"
    );
    assert_eq!(lines.count(), 2500);
}

#[test]
fn ou_subcommands() {
    let out = witten_gap(&["ou", "--K", "0", "--d", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let l = json(&out)["computed"]["lambda1"].as_f64().unwrap();
    assert!((l - std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-6, "{l}");

    let out = witten_gap(&["ou", "--K", "1", "--d", "2", "--check-shift"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["computed"]["shift_defect"].as_f64().unwrap() < 1e-4);

    let out = witten_gap(&["ou", "--verify", "--K", "-2", "--d", "3.14159265"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn spectral_circle_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("circle.off");
    let vec = dir.path().join("u.csv");
    let out = witten_gap(&[
        "spectral",
        "--case",
        "circle",
        "--n",
        "1000",
        "--export-mesh",
        mesh.to_str().unwrap(),
        "--export-eigenvector",
        vec.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let l = json(&out)["computed"]["lambda1"].as_f64().unwrap();
    assert!((l - 1.0).abs() <= 1e-4, "{l}");
    assert!(std::fs::read_to_string(&mesh)
        .unwrap()
        .starts_with("OFF\n1000 0 1000\n"));
    let csv = std::fs::read_to_string(&vec).unwrap();
    assert_eq!(csv.lines().count(), 1001);
}

#[test]
fn spectral_sphere_height() {
    let out = witten_gap(&[
        "spectral",
        "--case",
        "sphere-height",
        "--a",
        "0.5",
        "--subdivisions",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["computed"]["lambda1"].as_f64().unwrap() >= v["bounds"]["sup_bound_closed"].as_f64().unwrap());
    // the height case needs its coefficient
    assert_eq!(
        witten_gap(&["spectral", "--case", "sphere-height"]).status.code(),
        Some(2)
    );
}

#[test]
fn shrinker_export_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let log = dir.path().join("shoot.jsonl");
    let out = witten_gap(&[
        "shrinker",
        "--al",
        "2",
        "3",
        "--export",
        curve.to_str().unwrap(),
        "--log",
        log.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json(&out);
    assert_eq!(reports.as_array().unwrap().len(), 2);
    let text = std::fs::read_to_string(&curve).unwrap();
    assert!(text.starts_with("# closure_residual"));
    assert_eq!(text.lines().nth(1).unwrap(), "s,x,y,theta,k,phi");
    for line in std::fs::read_to_string(&log).unwrap().lines() {
        let step: Value = serde_json::from_str(line).unwrap();
        assert!(step["r0"].is_f64());
    }

    let out = witten_gap(&["shrinker", "--circle", "--lambda", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["notes"]
        .as_array()
        .unwrap()
        .iter()
        .any(|n| n.as_str().unwrap().contains("trivial")));
}

#[test]
fn invalid_flags_exit_2() {
    assert_eq!(witten_gap(&["bounds", "--K", "abc", "--d", "1"]).status.code(), Some(2));
    assert_eq!(witten_gap(&["ou", "--K", "1"]).status.code(), Some(2));
    assert_eq!(witten_gap(&["bounds", "--K", "1", "--d", "-1"]).status.code(), Some(2));
    assert_eq!(witten_gap(&["shrinker", "--al", "1", "1"]).status.code(), Some(2));
    assert_eq!(witten_gap(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(witten_gap(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_all_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    std::fs::write(&cfg, SMALL_CONFIG).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");

    let first = witten_gap(&[
        "--config",
        cfg.to_str().unwrap(),
        "verify-all",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let second = Command::new(env!("CARGO_BIN_EXE_witten-gap"))
        .args(["verify-all", "--config", cfg.to_str().unwrap()])
        .env("WITTEN_GAP_OUT", &b)
        .output()
        .unwrap();
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    let files_a = read_dir_sorted(&a);
    assert_eq!(files_a, read_dir_sorted(&b));
    let summary: Value = serde_json::from_slice(&std::fs::read(a.join("summary.json")).unwrap()).unwrap();
    assert!(summary["passed"].as_u64().unwrap() >= 10);
    assert_eq!(summary["total"].as_u64().unwrap() as usize, files_a.len() - 1);
}

#[test]
fn verify_all_reports_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("coarse.cfg");
    // far too coarse for the 1e-6 oracle tolerance
    std::fs::write(&cfg, format!("{SMALL_CONFIG}sup_grid = 100\n")).unwrap();
    let out = witten_gap(&[
        "--config",
        cfg.to_str().unwrap(),
        "verify-all",
        "--out",
        dir.path().join("r").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("first failing case: bounds-closed-vs-grid"));
    let bad = witten_gap(&[
        "--config",
        dir.path().join("missing.cfg").to_str().unwrap(),
        "verify-all",
    ]);
    assert_ne!(bad.status.code(), Some(0));
}
