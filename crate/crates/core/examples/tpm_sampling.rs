//! Samples (x, y) pairs from the noiseless circuit and compares the raw
//! work moments with the exact oracle.

use tfim_tur::lattice::heavy_hex_fragment;
use tfim_tur::oracle::exact_tpm_distribution;
use tfim_tur::protocol::DriveParams;
use tfim_tur::sim::{parity_filter, run_tpm};
use tfim_tur::workstats::{raw_estimators, tur_check};

fn main() -> tfim_tur::error::Result<()> {
    let g = heavy_hex_fragment(8)?;
    let p = DriveParams::new(0.5, 1.0, 2.0, 8)?;
    let samples = run_tpm(&g, &p, 20_000, None, 7)?;
    let (kept, efficiency) = parity_filter(&samples);
    let raw = raw_estimators(&kept)?;
    let exact = exact_tpm_distribution(&g, &p, false)?.moments();

    println!("parity efficiency {efficiency:.4}");
    println!(
        "raw   <W> = {:.5} ± {:.5}   Var W = {:.5}",
        raw.mean,
        raw.mean_std_error(),
        raw.variance
    );
    println!("exact <W> = {:.5}             Var W = {:.5}", exact.mean, exact.variance);
    let tur = tur_check(&exact, p.beta)?;
    println!("TUR: sigma {:.4}, bound {:.4}, satisfied {}", tur.sigma, tur.bound, tur.satisfied);
    Ok(())
}
