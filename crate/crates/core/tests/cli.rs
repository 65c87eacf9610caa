mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::correlated_table;
use pcacluster::ingest::standardize;
use pcacluster::pca::{fit_pca, SelectionRule};

fn pcacluster(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcacluster"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, text: &str) -> String {
    std::fs::write(path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn version_exits_zero() {
    let out = pcacluster(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(pcacluster(&[]).status.code(), Some(1));
    assert_eq!(pcacluster(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(pcacluster(&["run"]).status.code(), Some(1));
}

#[test]
fn missing_config_exits_one() {
    let out = pcacluster(&["run", "--config", "/nonexistent/pcacluster.conf"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("pcacluster: "));
}

#[test]
fn invalid_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        &dir.path().join("c.conf"),
        "synthetic = true\noutput = out\nk_regions = many\n",
    );
    let out = pcacluster(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config line 3"));
}

#[test]
fn run_on_file_input_matches_library_selection() {
    let dir = tempfile::tempdir().unwrap();
    let table = correlated_table(85, 19, 21);
    table
        .write_csv_file(&dir.path().join("regions.csv"))
        .unwrap();
    let expected = fit_pca(&standardize(&table).unwrap())
        .unwrap()
        .select_components(SelectionRule::Kaiser);
    let cfg = write(
        &dir.path().join("run.conf"),
        "# regional run\ninput = regions.csv\noutput = results\ncomponent_rule = kaiser\nk_regions = 4\n",
    );
    let out = pcacluster(&["run", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = std::fs::read_to_string(dir.path().join("results/summary.txt")).unwrap();
    assert!(
        summary.contains(&format!("components={expected}\n")),
        "{summary}"
    );
    assert!(dir.path().join("results/manifest.csv").exists());
}

#[test]
fn synth_writes_table_and_truth() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        &dir.path().join("spec.conf"),
        "regions = 30\nindicators = 5\nclusters = 3\nseed = 4\n",
    );
    let out_dir = dir.path().join("synth");
    let out = pcacluster(&["synth", "--spec", &spec, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = std::fs::read_to_string(out_dir.join("synthetic_table.csv")).unwrap();
    assert_eq!(table.lines().count(), 31);
    assert!(table.starts_with("region,X1,X2,X3,X4,X5\n"));
    let truth = std::fs::read_to_string(out_dir.join("truth.csv")).unwrap();
    assert!(truth.starts_with("region,cluster\n"));
    let manifest = std::fs::read_to_string(out_dir.join("manifest.csv")).unwrap();
    assert!(manifest.contains("truth.csv") && manifest.contains("synthetic_table.csv"));
}

#[test]
fn synthetic_run_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        &dir.path().join("s.conf"),
        "synthetic = true\nseed = 2018\ncluster_space = both\noutput = out\n",
    );
    let out = pcacluster(&["run", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = std::fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("ari_raw_truth="));
    assert!(summary.contains("rand="));
}
