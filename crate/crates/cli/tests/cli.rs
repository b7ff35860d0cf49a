use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn geolab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geolab"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_owned)
        .collect()
}

#[test]
fn modular_spectrum_is_cached_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let out = geolab(dir.path(), &["spectrum", "--model", "modular", "--norm-bound", "1e4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let file = dir.path().join("spectrum_modular_10000.csv");
    let first = fs::read(&file).unwrap();
    let text = String::from_utf8_lossy(&first);
    assert!(text.starts_with("# config="));
    assert!(text.contains("# tool_version="));

    let again = geolab(dir.path(), &["spectrum", "--model", "modular", "--norm-bound", "1e4"]);
    assert_eq!(again.status.code(), Some(0));
    assert!(stderr(&again).contains("reusing"));
    assert_eq!(fs::read(&file).unwrap(), first);
}

#[test]
fn changed_settings_invalidate_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    geolab(dir.path(), &["spectrum", "--model", "modular", "--norm-bound", "1e3"]);
    let out = geolab(dir.path(), &["spectrum", "--model", "modular", "--norm-bound", "1e3", "--max-elements", "3000000"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("recomputing"));
}

#[test]
fn psi_is_byte_identical_on_rerun() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["psi", "--model", "modular", "--norm-bound", "1e4", "--grid", "10:1e3:50log"];
    assert_eq!(geolab(a.path(), &args).status.code(), Some(0));
    assert_eq!(geolab(b.path(), &args).status.code(), Some(0));
    // the config line records the output directory, so compare from the body on
    let body = |p: &Path| {
        let t = fs::read_to_string(p.join("psi.csv")).unwrap();
        t.lines().filter(|l| !l.starts_with("# config=")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(body(a.path()), body(b.path()));
    assert_eq!(data_rows(&a.path().join("psi.csv")).len(), 50);
}

#[test]
fn beta_at_the_boundary_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = geolab(dir.path(), &["scan", "--beta", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--beta"));
}

#[test]
fn missing_eigenvalue_file_names_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = geolab(dir.path(), &["compare", "--eigenvalues", "/definitely/not/here.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--eigenvalues"));

    let out = geolab(dir.path(), &["compare"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--eigenvalues"));
}

#[test]
fn malformed_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = geolab(dir.path(), &["psi", "--grid", "10:1e3"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"model": "modular", "norm_bound": 500, "grid": "5:100:7log"}"#).unwrap();
    let out = geolab(dir.path(), &["psi", "--config", cfg.to_str().unwrap(), "--grid", "5:100:9lin"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(data_rows(&dir.path().join("psi.csv")).len(), 9);

    fs::write(&cfg, r#"{"modle": "modular"}"#).unwrap();
    let out = geolab(dir.path(), &["psi", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn doubling_scan_density_halves_resolution_error() {
    let dir = tempfile::tempdir().unwrap();
    let resolution = |density: &str| {
        let out = geolab(dir.path(), &["scan", "--n", "4:5", "--density", density]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let text = fs::read_to_string(dir.path().join("scan/n4_G.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["resolution_error"].as_f64().unwrap()
    };
    let coarse = resolution("128");
    let fine = resolution("256");
    assert!((coarse / fine - 2.0).abs() < 1e-12);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("scan.json")).unwrap()).unwrap();
    assert!(summary["c_hat"].as_f64().unwrap().is_finite());
    assert_eq!(summary["tool_version"].as_str().unwrap(), concat!("geodesic-lab ", env!("CARGO_PKG_VERSION")));
}

#[test]
fn capped_enumeration_exits_with_warning_status() {
    let dir = tempfile::tempdir().unwrap();
    let out = geolab(dir.path(), &["spectrum", "--word-cap", "8"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("best-effort"));
    let text = fs::read_to_string(dir.path().join("spectrum_bolza_1000.csv")).unwrap();
    assert!(text.contains("complete=false"));
}

#[test]
fn zeros_and_compare_write_their_reports() {
    let dir = tempfile::tempdir().unwrap();
    let evs = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/bolza_eigenvalues.txt");
    let out = geolab(dir.path(), &["zeros", "--eigenvalues", evs, "--area", "12.566370614359172"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(data_rows(&dir.path().join("zeros.csv")).len(), 23);

    let out = geolab(dir.path(), &["compare", "--eigenvalues", evs]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("compare.json")).unwrap()).unwrap();
    assert_eq!(v["containment"]["total"].as_u64(), Some(100));
    assert_eq!(v["genus"].as_u64(), Some(2));
}
