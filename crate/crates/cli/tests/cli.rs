use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use field_core::io::pgm::{load_pgm, save_pgm};
use field_core::levelset::{circle_points, hausdorff, zero_crossings, Shape};
use field_core::ScalarField;
use tempfile::TempDir;

fn amoeba(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amoeba")).args(args).output().expect("binary runs")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stdout: {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_image(dir: &Path, name: &str, f: &ScalarField) -> PathBuf {
    let p = dir.join(name);
    save_pgm(f, &p).unwrap();
    p
}

fn disc() -> ScalarField {
    let shape = Shape::Circle { cx: 64.0, cy: 64.0, r: 30.0 };
    ScalarField::from_fn(128, 128, 1.0, |x, y| if shape.contains(x as f64, y as f64) { 255.0 } else { 0.0 }).unwrap()
}

fn read_points(path: &Path) -> Vec<[f64; 2]> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|t| t.parse().unwrap()).collect();
            [v[0], v[1]]
        })
        .collect()
}

fn read_table(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn num(row: &[String], i: usize) -> f64 {
    row[i].parse().unwrap()
}

fn disc_distance(points: &[[f64; 2]]) -> f64 {
    hausdorff(points, &circle_points(64.0, 64.0, 30.0, 720))
}

#[test]
fn amf_keeps_constant_image() {
    let dir = TempDir::new().unwrap();
    let f = ScalarField::filled(20, 15, 1.0, 77.0).unwrap();
    let input = write_image(dir.path(), "c.pgm", &f);
    ok(&amoeba(&["amf", s(&input), "--out", s(dir.path()), "--set", "rho=2.5", "--set", "iterations=3"]));
    assert_eq!(load_pgm(dir.path().join("amf_0003.pgm")).unwrap(), f);
    assert!(dir.path().join("manifest.json").exists());
}

/// Column `x` maximising the summed jump `|f(x+1, y) − f(x, y)|` over all rows.
fn edge_column(f: &ScalarField) -> usize {
    let jump = |x: usize| (0..f.height()).map(|y| (f.get(x + 1, y) - f.get(x, y)).abs()).sum::<f64>();
    (0..f.width() - 1).max_by(|&a, &b| jump(a).total_cmp(&jump(b))).unwrap()
}

#[test]
fn amf_preserves_a_noisy_step_edge() {
    let dir = TempDir::new().unwrap();
    let mut state = 12345u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as f64 / (1u64 << 31) as f64
    };
    let f = ScalarField::from_fn(40, 30, 1.0, |x, _| {
        let base = if x < 20 { 60.0 } else { 190.0 };
        let (r, e) = (next(), next());
        if r < 0.05 {
            0.0
        } else if r < 0.1 {
            255.0
        } else {
            base + (30.0 * e - 15.0).round()
        }
    })
    .unwrap();
    let input = write_image(dir.path(), "step.pgm", &f);
    ok(&amoeba(&[
        "amf", s(&input), "--out", s(dir.path()), "--set", "beta=0.1", "--set", "rho=3", "--set", "iterations=5",
    ]));
    let out = load_pgm(dir.path().join("amf_0005.pgm")).unwrap();
    assert_eq!(edge_column(&f), 19);
    let c = edge_column(&out);
    assert!((c as i64 - 19).abs() <= 1, "edge moved to column {c}");
    let spread = |g: &ScalarField| (0..g.height()).map(|y| (g.get(5, y) - 60.0).abs()).sum::<f64>();
    assert!(spread(&out) < spread(&f), "no smoothing away from the edge");
}

#[test]
fn nonpositive_rho_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let input = write_image(dir.path(), "c.pgm", &ScalarField::filled(8, 8, 1.0, 1.0).unwrap());
    let out = amoeba(&["amf", s(&input), "--out", s(dir.path()), "--set", "rho=0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("rho"), "{}", stderr(&out));
}

#[test]
fn unknown_config_key_is_named() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"rho": 2, "radius": 3}"#).unwrap();
    let input = write_image(dir.path(), "c.pgm", &ScalarField::filled(8, 8, 1.0, 1.0).unwrap());
    let out = amoeba(&["amf", s(&input), "--out", s(dir.path()), "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("radius"), "{}", stderr(&out));
}

#[test]
fn aac_segments_disc_from_outside() {
    let dir = TempDir::new().unwrap();
    let f = write_image(dir.path(), "disc.pgm", &disc());
    ok(&amoeba(&[
        "aac", s(&f), "--u0", "circle:64,64,50", "--out", s(dir.path()), "--set", "beta=0.1", "--set", "rho=8",
        "--set", "iterations=150",
    ]));
    let d = disc_distance(&read_points(&dir.path().join("aac_0150_contour.csv")));
    assert!(d <= 2.0, "Hausdorff {d}");
    let overlay = load_pgm(dir.path().join("aac_0150_overlay.pgm")).unwrap();
    assert!(overlay.values().contains(&255.0));
}

#[test]
fn biased_aac_expands_from_inside() {
    let dir = TempDir::new().unwrap();
    let f = write_image(dir.path(), "disc.pgm", &disc());
    ok(&amoeba(&[
        "aac", s(&f), "--u0", "circle:64,64,15", "--out", s(dir.path()), "--set", "beta=0.1", "--set", "rho=5",
        "--set", "iterations=150", "--set", "bias=fixed_offset", "--set", "bias_value=15",
    ]));
    let d = disc_distance(&read_points(&dir.path().join("aac_0150_contour.csv")));
    assert!(d <= 2.0, "Hausdorff {d}");
}

#[test]
fn median_quantile_equals_unbiased_run() {
    let dir = TempDir::new().unwrap();
    let f = write_image(dir.path(), "disc.pgm", &disc());
    let run = |sub: &str, extra: &[&str]| {
        let out = dir.path().join(sub);
        let mut args = vec!["aac", s(&f), "--u0", "rect:30,40,100,90", "--out", s(&out), "--set", "rho=4", "--set", "iterations=4"];
        args.extend_from_slice(extra);
        ok(&amoeba(&args));
        std::fs::read(out.join("aac_0004_contour.csv")).unwrap()
    };
    let plain = run("plain", &[]);
    let median = run("median", &["--set", "bias=quantile", "--set", "bias_value=0.5"]);
    assert_eq!(plain, median);
}

#[test]
fn aac_rejects_mismatched_u0() {
    let dir = TempDir::new().unwrap();
    let f = write_image(dir.path(), "f.pgm", &ScalarField::filled(16, 16, 1.0, 5.0).unwrap());
    let u0 = write_image(dir.path(), "u0.pgm", &ScalarField::filled(12, 16, 1.0, 5.0).unwrap());
    let out = amoeba(&["aac", s(&f), "--u0", s(&u0), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("dimension"), "{}", stderr(&out));
}

#[test]
fn manifest_rerun_is_bit_exact() {
    let dir = TempDir::new().unwrap();
    let f = write_image(dir.path(), "disc.pgm", &disc());
    let first = dir.path().join("first");
    ok(&amoeba(&[
        "aac", s(&f), "--u0", "circle:60,66,40", "--out", s(&first), "--set", "rho=5", "--set", "iterations=6",
        "--set", "snapshot_every=3", "--set", "bias=quadratic", "--set", "bias_value=0.002",
    ]));
    let second = dir.path().join("second");
    ok(&amoeba(&["aac", s(&f), "--config", s(&first.join("manifest.json")), "--out", s(&second)]));
    for name in ["aac_0003_u.pgm", "aac_0006_u.pgm", "aac_0006_overlay.pgm", "aac_0006_contour.csv"] {
        assert_eq!(std::fs::read(first.join(name)).unwrap(), std::fs::read(second.join(name)).unwrap(), "{name}");
    }
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(first.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "aac");
    assert_eq!(manifest["iterations"], 6);
    assert_eq!(manifest["config"]["u0"], "circle:60,66,40");
}

#[test]
fn gac_segments_disc() {
    let dir = TempDir::new().unwrap();
    let f = write_image(dir.path(), "disc.pgm", &disc());
    ok(&amoeba(&[
        "pde", "--f", s(&f), "--u0", "circle:64,64,50", "--out", s(dir.path()), "--set", "lambda=5", "--set", "sigma=1",
        "--set", "k=-0.5", "--set", "force_mode=modulated", "--set", "iterations=1000",
    ]));
    let d = disc_distance(&read_points(&dir.path().join("gac_1000_contour.csv")));
    assert!(d <= 2.0, "Hausdorff {d}");
}

#[test]
fn huge_shrinkage_threshold_equals_no_force() {
    let dir = TempDir::new().unwrap();
    let f = write_image(dir.path(), "disc.pgm", &disc());
    let run = |sub: &str, force: &str| {
        let out = dir.path().join(sub);
        ok(&amoeba(&[
            "pde", "--f", s(&f), "--u0", "circle:64,64,45", "--out", s(&out), "--set", "k=2", "--set", "k_bar=1e9",
            "--set", &format!("force_mode={force}"), "--set", "iterations=20",
        ]));
        std::fs::read(out.join("gac_0020_contour.csv")).unwrap()
    };
    assert_eq!(run("shrink", "shrinkage"), run("none", "none"));
}

#[test]
fn self_snakes_keep_disc_boundary() {
    let dir = TempDir::new().unwrap();
    let img = write_image(dir.path(), "disc.pgm", &disc());
    ok(&amoeba(&[
        "pde", "--mode", "selfsnakes", "--u0", s(&img), "--out", s(dir.path()), "--set", "lambda=10", "--set",
        "iterations=100",
    ]));
    let u = load_pgm(dir.path().join("selfsnakes_0100.pgm")).unwrap().map(|v| v - 127.5).unwrap();
    let d = disc_distance(&zero_crossings(&u));
    let d0 = disc_distance(&zero_crossings(&disc().map(|v| v - 127.5).unwrap()));
    assert!((d - d0).abs() <= 1.0, "boundary drift {d0} -> {d}");
}

#[test]
fn gac_needs_a_pilot_image() {
    let dir = TempDir::new().unwrap();
    let out = amoeba(&["pde", "--u0", "circle:5,5,3", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_suite_lists_valid_ones() {
    let dir = TempDir::new().unwrap();
    let out = amoeba(&["verify", "everything", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    for name in ["coeffs", "selfsnakes", "jmiv", "theorem", "force"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn verify_writes_csv_and_verdicts() {
    let dir = TempDir::new().unwrap();
    for suite in ["coeffs", "selfsnakes", "force"] {
        let out = amoeba(&["verify", suite, "--out", s(dir.path())]);
        ok(&out);
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.contains("PASS") && !stdout.contains("FAIL"), "{stdout}");
        assert!(dir.path().join(format!("verify_{suite}.csv")).exists());
    }
}

#[test]
fn theorem_suite_reports_convergence_order() {
    let dir = TempDir::new().unwrap();
    ok(&amoeba(&["verify", "theorem", "--out", s(dir.path())]));
    let rows = read_table(&dir.path().join("verify_theorem.csv"));
    let header = std::fs::read_to_string(dir.path().join("verify_theorem.csv")).unwrap();
    let cols: Vec<&str> = header.lines().next().unwrap().split(',').collect();
    let order = cols.iter().position(|&c| c == "observed_order").unwrap();
    let generic: Vec<f64> = rows
        .iter()
        .filter(|r| r.iter().any(|c| c == "generic"))
        .map(|r| num(r, order))
        .filter(|v| v.is_finite())
        .collect();
    assert!(!generic.is_empty());
    assert!(generic.iter().all(|&p| p > 0.4), "{generic:?}");
}

#[test]
fn curves_match_parity_and_zero_patterns() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("l2.csv");
    ok(&amoeba(&["curves", "--metric", "l2", "--alphas", &format!("0,{FRAC_PI_2}"), "--s-max", "2", "--output", s(&p)]));
    let rows = read_table(&p);
    assert_eq!(rows.len(), 2 * 61);
    for r in &rows {
        let (sv, alpha) = (num(r, 0), num(r, 1));
        if alpha == 0.0 {
            assert_eq!(num(r, 3), 0.0);
        } else {
            assert!(num(r, 2).abs() < 1e-15 && num(r, 4).abs() < 1e-15, "{r:?}");
            if sv > 0.0 {
                assert!(num(r, 3) > 0.0, "{r:?}");
            }
        }
    }
    let p = dir.path().join("l1.csv");
    ok(&amoeba(&["curves", "--metric", "l1", "--alphas", "0", "--s-count", "5", "--output", s(&p)]));
    let first = &read_table(&p)[0];
    assert_eq!(num(first, 0), 0.0);
    assert!(num(first, 2).abs() > 0.1 && num(first, 4).abs() > 0.1, "{first:?}");
}
