//! A reduced τ-scan through the sweep harness, writing results and plot data
//! into a temporary directory (or the directory given as first argument).

use std::path::PathBuf;

use tfim_tur::experiment::{emit_plotdata, run_experiment, ConfigFile, ExperimentConfig, Family, Overrides};

const CONFIG: &str = r#"
family = "scan"
tau = [0.5, 1.0, 1.5, 2.0]
beta = [2.0, 0.5]
n_spin = [7, 10]
shots = 4000
seed = 2024
estimators = ["raw", "ext_sqt", "exact", "lrt", "wn"]
"#;

fn main() -> tfim_tur::error::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("tfim-tur-scan"));
    let cfg = ExperimentConfig::resolve(
        ConfigFile::parse(CONFIG)?,
        Overrides {
            out: Some(out.clone()),
            ..Default::default()
        },
    )?;
    let rows = run_experiment(&cfg)?;
    println!("{} rows written to {}", rows.len(), out.display());
    for r in rows.iter().filter(|r| r.n_spin == 10 && r.beta == 2.0) {
        println!(
            "tau {:>4} {:<8} <W> {:>9.5}  Var {:>9.5}  TUR {}",
            r.tau, r.estimator_tag, r.mean_w, r.var_w, r.tur_satisfied
        );
    }
    for f in emit_plotdata(&rows, Family::Scan, &out.join("plotdata"))? {
        println!("{}", f.display());
    }
    Ok(())
}
