//! Closed-form white-noise moments against direct sampling.

use tfim_tur::analytic::{wn_moments, wn_sampler};
use tfim_tur::rng::stream;
use tfim_tur::workstats::raw_estimators;

fn main() -> tfim_tur::error::Result<()> {
    let n = 10;
    let mut rng = stream(42, 0);
    for beta in [0.1, 0.5, 1.0, 2.0] {
        let (m, v) = wn_moments(n, beta)?;
        let s = raw_estimators(&wn_sampler(n, beta, 100_000, &mut rng))?;
        println!(
            "beta {beta:>4}: mean {m:>9.5} (sampled {:>9.5})  var {v:>9.5} (sampled {:>9.5})",
            s.mean, s.variance
        );
    }
    Ok(())
}
