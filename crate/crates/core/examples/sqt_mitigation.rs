//! Runs a noisy low-temperature experiment and compares raw, SQT and
//! Ext-SQT estimates against the noiseless exact value.

use tfim_tur::lattice::heavy_hex_fragment;
use tfim_tur::oracle::exact_tpm_distribution;
use tfim_tur::protocol::DriveParams;
use tfim_tur::sim::{parity_filter, run_tpm, NoiseSpec};
use tfim_tur::sqt::{ext_sqt_estimate, sqt_from_samples, DEFAULT_DELTA, DEFAULT_MAX_SUBSPACE};
use tfim_tur::workstats::raw_estimators;

fn main() -> tfim_tur::error::Result<()> {
    let g = heavy_hex_fragment(10)?;
    let p = DriveParams::new(10.0, 1.0, 1.0, 10)?;
    let noise = NoiseSpec::new(0.02, 0.0)?;
    let samples = run_tpm(&g, &p, 20_000, Some(&noise), 3)?;
    let (kept, eff) = parity_filter(&samples);

    let exact = exact_tpm_distribution(&g, &p, false)?.moments();
    let raw = raw_estimators(&kept)?;
    let sqt = sqt_from_samples(&g, &kept, &p, DEFAULT_MAX_SUBSPACE)?;
    let ext = ext_sqt_estimate(&g, &kept, &p, DEFAULT_DELTA)?;

    println!("kept {} of {} shots ({eff:.3})", kept.len(), samples.len());
    println!("{:<8} {:>12} {:>12} {:>6}", "", "<W>", "Var W", "M");
    println!("{:<8} {:>12.6} {:>12.6}", "exact", exact.mean, exact.variance);
    println!("{:<8} {:>12.6} {:>12.6}", "raw", raw.mean, raw.variance);
    println!("{:<8} {:>12.6} {:>12.6} {:>6}", "sqt", sqt.stats.mean, sqt.stats.variance, sqt.subspace_dim);
    println!("{:<8} {:>12.6} {:>12.6} {:>6}", "ext_sqt", ext.stats.mean, ext.stats.variance, ext.subspace_dim);
    Ok(())
}
