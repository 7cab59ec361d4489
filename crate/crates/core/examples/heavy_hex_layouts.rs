//! Prints the fifteen heavy-hex layouts with their edge colouring and
//! circuit cost at n_T equal to the graph diameter.

use tfim_tur::lattice::{circuit_cost, color_edges, graph_diameter, heavy_hex_layout, N_LAYOUTS};

fn main() -> tfim_tur::error::Result<()> {
    println!("layout  n    |E|  diam  colors  depth  ops");
    for k in 1..=N_LAYOUTS {
        let g = heavy_hex_layout(k)?;
        let coloring = color_edges(&g);
        coloring.validate(&g)?;
        let d = graph_diameter(&g)?;
        let cost = circuit_cost(&g, d)?;
        println!(
            "{k:>6}  {:<4} {:<4} {d:<5} {:<7} {:<6} {}",
            g.n_vertices(),
            g.n_edges(),
            coloring.n_colors(),
            cost.total_depth,
            cost.total_ops
        );
    }
    Ok(())
}
