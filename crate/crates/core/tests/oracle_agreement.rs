use num_complex::Complex64;

use tfim_tur::bits::BitString;
use tfim_tur::lattice::{color_edges, heavy_hex_fragment};
use tfim_tur::oracle::{exact_trotter_unitary, TransitionTable};
use tfim_tur::protocol::{build_program, DriveParams};
use tfim_tur::rng::stream;
use tfim_tur::sim::{apply_program, exact_conditional_moments, sample_final, StateVector};

#[test]
fn statevector_matches_oracle_on_every_basis_input() {
    let g = heavy_hex_fragment(6).unwrap();
    let p = DriveParams::new(1.0, 1.3, 2.0, 7).unwrap();
    let u = exact_trotter_unitary(&g, &p).unwrap();
    let drive = build_program(&g, &color_edges(&g), &p).unwrap().drive_only();
    let mut rng = stream(0, 0);
    for x in 0..64 {
        let mut psi = StateVector::basis(&BitString::from_index(x, 6)).unwrap();
        apply_program(&mut psi, &drive, None, &mut rng).unwrap();
        for (y, a) in psi.amplitudes().iter().enumerate() {
            let want: Complex64 = u[(y, x)];
            assert!((a - want).norm() < 1e-10, "x {x} y {y}: {a} vs {want}");
        }
    }
}

#[test]
fn conditional_moments_match_transition_table() {
    let g = heavy_hex_fragment(7).unwrap();
    let p = DriveParams::new(0.5, 0.8, 1.5, 6).unwrap();
    let cm = TransitionTable::from_unitary(&exact_trotter_unitary(&g, &p).unwrap())
        .unwrap()
        .conditional_moments();
    for x in 0..128 {
        let (m1, m2) = exact_conditional_moments(&g, &p, &BitString::from_index(x, 7)).unwrap();
        assert!((m1 - cm.m1[x]).abs() < 1e-10, "x {x}");
        assert!((m2 - cm.m2[x]).abs() < 1e-10, "x {x}");
    }
}

#[test]
fn born_sampling_matches_probabilities() {
    let g = heavy_hex_fragment(5).unwrap();
    let p = DriveParams::new(1.0, 1.0, 3.0, 8).unwrap();
    let drive = build_program(&g, &color_edges(&g), &p).unwrap().drive_only();
    let mut rng = stream(3, 1);
    let mut psi = StateVector::basis(&BitString::from_index(0b10110, 5)).unwrap();
    apply_program(&mut psi, &drive, None, &mut rng).unwrap();
    let probs = psi.probabilities();
    let draws = 100_000;
    let mut counts = vec![0usize; probs.len()];
    for _ in 0..draws {
        counts[sample_final(&psi, None, &mut rng).to_index()] += 1;
    }
    let tv: f64 = 0.5
        * counts
            .iter()
            .zip(&probs)
            .map(|(&c, &q)| (c as f64 / draws as f64 - q).abs())
            .sum::<f64>();
    assert!(tv < 0.02, "total variation {tv}");
}
