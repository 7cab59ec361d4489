use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tfim_tur::experiment::read_results;
use tfim_tur::lattice::heavy_hex_fragment;
use tfim_tur::protocol::DriveParams;
use tfim_tur::sim::{run_tpm, save_samples};
use tfim_tur::workstats::EstimatorTag;

fn tfim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfim-tur"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("sweep.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = r#"
family = "custom"
tau = [1.0]
gamma = [1.0, 2.0]
beta = [1.0]
n_trotter = [4]
n_spin = [5]
shots = 500
"#;

#[test]
fn run_is_reproducible_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    let first = tfim(&["run", "--config", &cfg, "--out", out_s, "--seed", "9"]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let csv_a = fs::read(out.join("results.csv")).unwrap();
    assert_eq!(tfim(&["run", "--config", &cfg, "--out", out_s, "--seed", "9"]).status.code(), Some(0));
    assert_eq!(csv_a, fs::read(out.join("results.csv")).unwrap());
    assert!(out.join("manifest.json").exists());

    let rows = read_results(&out.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 2 * EstimatorTag::ALL.len());

    let plot = tfim(&["plotdata", "--out", out_s, "--family", "coupling", "--estimators", "exact,lrt"]);
    assert_eq!(plot.status.code(), Some(0));
    let mean = fs::read_to_string(out.join("plotdata/mean_vs_gamma.csv")).unwrap();
    assert_eq!(mean.lines().count(), 1 + 4);
}

#[test]
fn seed_changes_sampled_rows_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    tfim(&["run", "--config", &cfg, "--out", a.to_str().unwrap(), "--seed", "1"]);
    tfim(&["run", "--config", &cfg, "--out", b.to_str().unwrap(), "--seed", "2"]);
    let ra = read_results(&a.join("results.csv")).unwrap();
    let rb = read_results(&b.join("results.csv")).unwrap();
    for (x, y) in ra.iter().zip(&rb) {
        if x.estimator_tag == EstimatorTag::Raw {
            assert_ne!(x.mean_w, y.mean_w);
        } else if !x.estimator_tag.is_sampled() {
            assert_eq!(x.mean_w, y.mean_w);
        }
    }
}

#[test]
fn samples_in_replays_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = heavy_hex_fragment(5).unwrap();
    let p = DriveParams::new(1.0, 1.0, 1.0, 4).unwrap();
    let samples_path = dir.path().join("samples.csv");
    save_samples(&samples_path, &run_tpm(&g, &p, 300, None, 4).unwrap()).unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("gamma = [1.0, 2.0]", "gamma = [1.0]"));
    let out = dir.path().join("out");
    let res = tfim(&[
        "run",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--samples-in",
        samples_path.to_str().unwrap(),
        "--estimators",
        "raw,sqt",
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = read_results(&out.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.n_samples == 300));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "beta = [-1.0]");
    assert_eq!(tfim(&["run", "--config", &bad]).status.code(), Some(2));
    let unknown = write_config(dir.path(), "colour = 3");
    assert_eq!(tfim(&["run", "--config", &unknown]).status.code(), Some(2));
    assert_eq!(tfim(&["run", "--config", "/nonexistent/x.toml"]).status.code(), Some(2));
    assert_eq!(tfim(&["run", "--family", "custom"]).status.code(), Some(2));
    assert_eq!(tfim(&["run", "--estimators", "exact"]).status.code(), Some(3));
    let capped = write_config(dir.path(), &SMALL.replace("n_spin = [5]", "n_spin = [13]"));
    let out = dir.path().join("o");
    let res = tfim(&[
        "run",
        "--config",
        &capped,
        "--out",
        out.to_str().unwrap(),
        "--estimators",
        "raw",
        "--max-statevector-qubits",
        "12",
    ]);
    // sample-based estimators beyond the cap are skipped, not fatal
    assert_eq!(res.status.code(), Some(0));
    assert!(read_results(&out.join("results.csv")).unwrap().is_empty());
    assert_eq!(tfim(&["oracle", "--n-spin", "11"]).status.code(), Some(3));
}

#[test]
fn cost_and_oracle_verbs() {
    let res = tfim(&["cost"]);
    assert_eq!(res.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(v["total_depth"], 120);
    assert_eq!(v["total_ops"], 8466);

    let res = tfim(&["oracle", "--n-spin", "4", "--beta", "2"]);
    assert_eq!(res.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!(v["tur"]["satisfied"].as_bool().unwrap());
}
