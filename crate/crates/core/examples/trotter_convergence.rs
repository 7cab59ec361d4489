//! Distance between the Trotter circuit and the continuum evolution as the
//! step count doubles.

use tfim_tur::lattice::Graph;
use tfim_tur::oracle::{continuum_evolution, exact_trotter_unitary, DEFAULT_REFINEMENT};
use tfim_tur::protocol::DriveParams;

fn main() -> tfim_tur::error::Result<()> {
    let g = Graph::cycle(4)?;
    let reference = continuum_evolution(&g, &DriveParams::new(1.0, 1.0, 1.0, 1)?, DEFAULT_REFINEMENT)?;
    println!("continuum reference: {} steps", reference.steps);
    let mut last: Option<f64> = None;
    for n_t in [4, 8, 16, 32, 64] {
        let p = DriveParams::new(1.0, 1.0, 1.0, n_t)?;
        let err = (exact_trotter_unitary(&g, &p)? - &reference.unitary).norm();
        let order = last.map(|e| (e / err).log2());
        println!("n_T {n_t:>3}: error {err:.3e}  order {}", order.map_or("-".into(), |o| format!("{o:.3}")));
        last = Some(err);
    }
    Ok(())
}
