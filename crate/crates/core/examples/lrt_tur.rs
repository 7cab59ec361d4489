//! Linear-response cumulants along a τ sweep and their position relative to
//! the TUR bound.

use tfim_tur::analytic::{g_env, lrt_cumulant, lrt_slope, LrtParams};
use tfim_tur::workstats::{tur_check, EstimatorTag, WorkStatistics};

fn main() -> tfim_tur::error::Result<()> {
    let beta = 1.0;
    let n_edges = 144;
    println!("slope of Var W against the TUR bound at beta = {beta}: {:.6}", lrt_slope(beta)?);
    println!("   tau      g(4tau)     <W>         Var W       bound");
    for k in 1..=20 {
        let tau = k as f64 * 0.2;
        let lp = LrtParams::new(beta, 1.0, tau, n_edges)?;
        let stats = WorkStatistics::new(lrt_cumulant(1, &lp)?, lrt_cumulant(2, &lp)?, 0, EstimatorTag::Lrt);
        let tur = tur_check(&stats, beta)?;
        println!(
            "{tau:>6.2}  {:>10.5}  {:>10.6}  {:>10.6}  {:>10.6}",
            g_env(4.0 * tau),
            stats.mean,
            stats.variance,
            tur.bound
        );
    }
    Ok(())
}
