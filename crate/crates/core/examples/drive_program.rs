//! Builds the two-point-measurement program for a small fragment and dumps
//! it as JSON.

use tfim_tur::lattice::{color_edges, heavy_hex_fragment};
use tfim_tur::protocol::{build_program, prep_angle, trotter_weights, DriveParams};

fn main() -> tfim_tur::error::Result<()> {
    let g = heavy_hex_fragment(7)?;
    let p = DriveParams::new(1.0, 1.0, 1.0, 4)?;
    let program = build_program(&g, &color_edges(&g), &p)?;

    println!("prep angle at beta = 1: {:.6}", prep_angle(p.beta));
    println!("trotter weights: {:?}", trotter_weights(&p));
    println!("depth {}, {} instructions", program.depth(), program.instructions().count());
    println!("{}", program.to_json());
    Ok(())
}
