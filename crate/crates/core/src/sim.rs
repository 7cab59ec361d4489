//! Statevector execution of gate programs and two-point-measurement sampling.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::lattice::{color_edges, Graph};
use crate::protocol::{build_program, prep_angle, DriveParams, Gate, GateProgram};
use crate::rng::{self, Rng};
use crate::workstats::energy_of;

/// Default cap on statevector size, in qubits.
pub const DEFAULT_MAX_STATEVECTOR_QUBITS: usize = 25;

/// Dense `2^n` amplitude vector; qubit `q` is bit `q` of the index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

impl StateVector {
    /// Basis state `|bits⟩`.
    pub fn basis(bits: &BitString) -> Result<Self> {
        Self::basis_capped(bits, DEFAULT_MAX_STATEVECTOR_QUBITS)
    }

    pub fn basis_capped(bits: &BitString, max_qubits: usize) -> Result<Self> {
        let n = bits.len();
        check_qubits(n, max_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[bits.to_index()] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits: n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply_ry(&mut self, q: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let m = 1usize << q;
        for i in (0..self.amps.len()).filter(|i| i & m == 0) {
            let a0 = self.amps[i];
            let a1 = self.amps[i | m];
            self.amps[i] = a0 * c - a1 * s;
            self.amps[i | m] = a0 * s + a1 * c;
        }
    }

    pub fn apply_rz(&mut self, q: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let lo = Complex64::new(c, -s);
        let hi = Complex64::new(c, s);
        let m = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & m == 0 { lo } else { hi };
        }
    }

    /// The same `RZ(θ)` on every qubit: a phase depending only on popcount.
    pub fn apply_rz_all(&mut self, theta: f64) {
        let n = self.n_qubits as f64;
        let phases: Vec<Complex64> = (0..=self.n_qubits)
            .map(|k| Complex64::from_polar(1.0, -theta / 2.0 * (n - 2.0 * k as f64)))
            .collect();
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= phases[i.count_ones() as usize];
        }
    }

    pub fn apply_rxx(&mut self, a: usize, b: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let ma = 1usize << a;
        let flip = ma | (1usize << b);
        let mis = Complex64::new(0.0, -s);
        for i in (0..self.amps.len()).filter(|i| i & ma == 0) {
            let j = i ^ flip;
            let u = self.amps[i];
            let v = self.amps[j];
            self.amps[i] = u * c + v * mis;
            self.amps[j] = v * c + u * mis;
        }
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        let m = 1usize << q;
        let i_unit = Complex64::new(0.0, 1.0);
        match p {
            Pauli::I => {}
            Pauli::X => {
                for i in (0..self.amps.len()).filter(|i| i & m == 0) {
                    self.amps.swap(i, i | m);
                }
            }
            Pauli::Y => {
                for i in (0..self.amps.len()).filter(|i| i & m == 0) {
                    let a0 = self.amps[i];
                    let a1 = self.amps[i | m];
                    self.amps[i] = -i_unit * a1;
                    self.amps[i | m] = i_unit * a0;
                }
            }
            Pauli::Z => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & m != 0 {
                        *a = -*a;
                    }
                }
            }
        }
    }

    /// `⟨H₀⟩` and `⟨H₀²⟩` for `H₀ = -ΣZ`.
    pub fn energy_moments(&self) -> (f64, f64) {
        let n = self.n_qubits as f64;
        let mut by_weight = vec![0.0; self.n_qubits + 1];
        for (i, a) in self.amps.iter().enumerate() {
            by_weight[i.count_ones() as usize] += a.norm_sqr();
        }
        by_weight.iter().enumerate().fold((0.0, 0.0), |(m1, m2), (k, p)| {
            let e = 2.0 * k as f64 - n;
            (m1 + p * e, m2 + p * e * e)
        })
    }
}

fn check_qubits(n: usize, max_qubits: usize) -> Result<()> {
    if n > max_qubits {
        return Err(Error::SizeLimit {
            what: "statevector qubits",
            actual: n,
            limit: max_qubits,
        });
    }
    Ok(())
}

/// Synthetic noise: two-qubit depolarizing after every RXX, and readout flips.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    pub p2: f64,
    pub p_read: f64,
}

impl NoiseSpec {
    pub fn new(p2: f64, p_read: f64) -> Result<Self> {
        let n = NoiseSpec { p2, p_read };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p2", self.p2), ("p_read", self.p_read)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.p2 == 0.0 && self.p_read == 0.0
    }
}

/// One two-point-measurement trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TpmSample {
    pub x: BitString,
    pub y: BitString,
}

impl TpmSample {
    pub fn new(x: BitString, y: BitString) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                actual: y.len(),
            });
        }
        Ok(TpmSample { x, y })
    }
}

/// Draws `x` from the product Gibbs state of `H₀ = -ΣZ`.
pub fn sample_initial(beta: f64, n: usize, rng: &mut Rng) -> BitString {
    let p_one = 1.0 / (1.0 + (2.0 * beta).exp());
    let mut x = BitString::zeros(n);
    for q in 0..n {
        if rng.random::<f64>() < p_one {
            x.set(q, true);
        }
    }
    x
}

/// Applies every gate of `program`. Measurement layers are skipped; use
/// [`GateProgram::drive_only`] or the sampling functions for the full protocol.
pub fn apply_program(
    state: &mut StateVector,
    program: &GateProgram,
    noise: Option<&NoiseSpec>,
    rng: &mut Rng,
) -> Result<()> {
    if state.n_qubits() != program.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: program.n_qubits(),
            actual: state.n_qubits(),
        });
    }
    let p2 = noise.map_or(0.0, |n| n.p2);
    for layer in program.layers() {
        apply_layer(state, layer, p2, rng);
    }
    Ok(())
}

fn apply_layer(state: &mut StateVector, layer: &[Gate], p2: f64, rng: &mut Rng) {
    if let Some(theta) = uniform_rz(layer, state.n_qubits()) {
        state.apply_rz_all(theta);
        return;
    }
    for gate in layer {
        match *gate {
            Gate::Ry { qubit, theta } => state.apply_ry(qubit, theta),
            Gate::Rz { qubit, theta } => state.apply_rz(qubit, theta),
            Gate::Rxx { qubits: (a, b), theta } => {
                state.apply_rxx(a, b, theta);
                if p2 > 0.0 && rng.random::<f64>() < p2 {
                    let k = rng.random_range(1..16);
                    state.apply_pauli(a, Pauli::ALL[k / 4]);
                    state.apply_pauli(b, Pauli::ALL[k % 4]);
                }
            }
            Gate::MeasureAll { .. } => {}
        }
    }
}

fn uniform_rz(layer: &[Gate], n: usize) -> Option<f64> {
    if layer.len() != n {
        return None;
    }
    let mut seen = 0usize;
    let mut angle = None;
    for gate in layer {
        match *gate {
            Gate::Rz { qubit, theta } if qubit < usize::BITS as usize => {
                if angle.is_some_and(|a| a != theta) {
                    return None;
                }
                angle = Some(theta);
                seen |= 1 << qubit;
            }
            _ => return None,
        }
    }
    (seen.count_ones() as usize == n).then_some(angle?)
}

/// Cumulative Born distribution of a state, for repeated sampling.
pub struct BornSampler {
    n_qubits: usize,
    cdf: Vec<f64>,
}

impl BornSampler {
    pub fn new(state: &StateVector) -> Self {
        let mut acc = 0.0;
        let cdf = state
            .amplitudes()
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        BornSampler {
            n_qubits: state.n_qubits(),
            cdf,
        }
    }

    pub fn sample(&self, noise: Option<&NoiseSpec>, rng: &mut Rng) -> BitString {
        let total = *self.cdf.last().expect("state has at least one amplitude");
        let u = rng.random::<f64>() * total;
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        let mut y = BitString::from_index(idx, self.n_qubits);
        if let Some(n) = noise.filter(|n| n.p_read > 0.0) {
            for q in 0..self.n_qubits {
                if rng.random::<f64>() < n.p_read {
                    y.flip(q);
                }
            }
        }
        y
    }
}

/// Draws `y` with probability `|⟨y|ψ⟩|²`, then applies readout flips.
pub fn sample_final(state: &StateVector, noise: Option<&NoiseSpec>, rng: &mut Rng) -> BitString {
    BornSampler::new(state).sample(noise, rng)
}

/// Runs `shots` trajectories of the protocol on `g` with a statevector
/// limited to [`DEFAULT_MAX_STATEVECTOR_QUBITS`].
pub fn run_tpm(
    g: &Graph,
    p: &DriveParams,
    shots: usize,
    noise: Option<&NoiseSpec>,
    seed: u64,
) -> Result<Vec<TpmSample>> {
    run_tpm_capped(g, p, shots, noise, seed, DEFAULT_MAX_STATEVECTOR_QUBITS)
}

/// Like [`run_tpm`] with an explicit qubit cap.
///
/// Initial bitstrings come from stream 0 of `seed`. Without gate noise each
/// distinct `x` is evolved once, on stream `1 + u` where `u` is its order of
/// first appearance; with gate noise every shot is its own trajectory on
/// stream `1 + shot`. The output is therefore independent of thread count.
pub fn run_tpm_capped(
    g: &Graph,
    p: &DriveParams,
    shots: usize,
    noise: Option<&NoiseSpec>,
    seed: u64,
    max_qubits: usize,
) -> Result<Vec<TpmSample>> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    if let Some(n) = noise {
        n.validate()?;
    }
    let n = g.n_vertices();
    check_qubits(n, max_qubits)?;
    let program = build_program(g, &color_edges(g), p)?.drive_only();

    let mut x_rng = rng::stream(seed, 0);
    let xs: Vec<BitString> = (0..shots).map(|_| sample_initial(p.beta, n, &mut x_rng)).collect();

    let gate_noise = noise.is_some_and(|nz| nz.p2 > 0.0);
    let parallel = n <= 20;

    let ys: Vec<BitString> = if gate_noise {
        let one = |k: usize| -> Result<BitString> {
            let mut r = rng::stream(seed, 1 + k as u64);
            let mut psi = StateVector::basis_capped(&xs[k], max_qubits)?;
            apply_program(&mut psi, &program, noise, &mut r)?;
            Ok(sample_final(&psi, noise, &mut r))
        };
        if parallel {
            (0..shots).into_par_iter().map(one).collect::<Result<_>>()?
        } else {
            (0..shots).map(one).collect::<Result<_>>()?
        }
    } else {
        let mut groups: Vec<(BitString, Vec<usize>)> = Vec::new();
        let mut slot: HashMap<BitString, usize> = HashMap::new();
        for (k, x) in xs.iter().enumerate() {
            let u = *slot.entry(*x).or_insert_with(|| {
                groups.push((*x, Vec::new()));
                groups.len() - 1
            });
            groups[u].1.push(k);
        }
        let one = |(u, (x, shots_of)): (usize, &(BitString, Vec<usize>))| -> Result<Vec<BitString>> {
            let mut r = rng::stream(seed, 1 + u as u64);
            let mut psi = StateVector::basis_capped(x, max_qubits)?;
            apply_program(&mut psi, &program, None, &mut r)?;
            let born = BornSampler::new(&psi);
            Ok(shots_of.iter().map(|_| born.sample(noise, &mut r)).collect())
        };
        let drawn: Vec<Vec<BitString>> = if parallel {
            groups.par_iter().enumerate().map(one).collect::<Result<_>>()?
        } else {
            groups.iter().enumerate().map(one).collect::<Result<_>>()?
        };
        let mut ys = vec![BitString::zeros(n); shots];
        for ((_, shots_of), drawn) in groups.iter().zip(drawn) {
            for (&k, y) in shots_of.iter().zip(drawn) {
                ys[k] = y;
            }
        }
        ys
    };

    Ok(xs.into_iter().zip(ys).map(|(x, y)| TpmSample { x, y }).collect())
}

/// Keeps samples whose `x` and `y` have equal popcount parity.
pub fn parity_filter(samples: &[TpmSample]) -> (Vec<TpmSample>, f64) {
    let kept: Vec<TpmSample> = samples
        .iter()
        .filter(|s| s.x.parity() == s.y.parity())
        .copied()
        .collect();
    let eff = if samples.is_empty() {
        0.0
    } else {
        kept.len() as f64 / samples.len() as f64
    };
    (kept, eff)
}

/// `(E[W|x], E[W²|x])` from the noiseless evolution of `|x⟩`.
pub fn exact_conditional_moments(g: &Graph, p: &DriveParams, x: &BitString) -> Result<(f64, f64)> {
    let program = build_program(g, &color_edges(g), p)?.drive_only();
    conditional_moments_with(&program, x)
}

/// [`exact_conditional_moments`] for a prebuilt drive program.
pub fn conditional_moments_with(drive: &GateProgram, x: &BitString) -> Result<(f64, f64)> {
    if x.len() != drive.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: drive.n_qubits(),
            actual: x.len(),
        });
    }
    let mut psi = StateVector::basis(x)?;
    let mut unused = rng::stream(0, 0);
    apply_program(&mut psi, drive, None, &mut unused)?;
    let (h1, h2) = psi.energy_moments();
    let ex = energy_of(x);
    Ok((h1 - ex, h2 - 2.0 * ex * h1 + ex * ex))
}

/// Initial-state preparation as a statevector: `⊗ RY(θ_β)|0⟩`.
pub fn prepared_state(beta: f64, n: usize) -> Result<StateVector> {
    let mut psi = StateVector::basis(&BitString::zeros(n))?;
    let theta = prep_angle(beta);
    for q in 0..n {
        psi.apply_ry(q, theta);
    }
    Ok(psi)
}

#[derive(Serialize, Deserialize)]
struct SampleRow {
    x_bits: String,
    y_bits: String,
}

pub fn write_samples<W: Write>(samples: &[TpmSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in samples {
        w.serialize(SampleRow {
            x_bits: s.x.to_string(),
            y_bits: s.y.to_string(),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples<R: Read>(input: R, source: &str) -> Result<Vec<TpmSample>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x_bits", "y_bits"] {
        return Err(Error::Parse {
            path: source.to_string(),
            line: 1,
            message: format!("expected header x_bits,y_bits, found {}", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<SampleRow>().enumerate() {
        let line = i + 2;
        let parse_err = |message: String| Error::Parse {
            path: source.to_string(),
            line,
            message,
        };
        let row = row.map_err(|e| parse_err(e.to_string()))?;
        let x: BitString = row.x_bits.parse().map_err(|e: Error| parse_err(e.to_string()))?;
        let y: BitString = row.y_bits.parse().map_err(|e: Error| parse_err(e.to_string()))?;
        let s = TpmSample::new(x, y).map_err(|_| parse_err("x_bits and y_bits differ in length".into()))?;
        if let Some(first) = out.first().map(|f: &TpmSample| f.x.len()) {
            if first != x.len() {
                return Err(parse_err(format!("expected {first} bits, found {}", x.len())));
            }
        }
        out.push(s);
    }
    Ok(out)
}

pub fn save_samples(path: &Path, samples: &[TpmSample]) -> Result<()> {
    write_samples(samples, std::fs::File::create(path)?)
}

pub fn load_samples(path: &Path) -> Result<Vec<TpmSample>> {
    read_samples(std::fs::File::open(path)?, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::heavy_hex_layout;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn rxx_pi_on_zero() {
        let mut psi = StateVector::basis(&"00".parse().unwrap()).unwrap();
        psi.apply_rxx(0, 1, PI);
        assert!(close(psi.amplitudes()[3], Complex64::new(0.0, -1.0)));
        assert!(psi.amplitudes()[0].norm() < 1e-15);
    }

    #[test]
    fn rz_all_matches_single_qubit_rz() {
        let mut a = prepared_state(0.4, 5).unwrap();
        a.apply_rxx(1, 3, 0.7);
        let mut b = a.clone();
        a.apply_rz_all(-0.37);
        for q in 0..5 {
            b.apply_rz(q, -0.37);
        }
        for (u, v) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!(close(*u, *v));
        }
    }

    #[test]
    fn pauli_y_is_i_x_z() {
        let mut a = prepared_state(0.3, 2).unwrap();
        a.apply_rxx(0, 1, 0.5);
        let mut b = a.clone();
        a.apply_pauli(1, Pauli::Y);
        b.apply_pauli(1, Pauli::Z);
        b.apply_pauli(1, Pauli::X);
        for (u, v) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!(close(*u, *v * Complex64::new(0.0, 1.0)));
        }
    }

    #[test]
    fn norm_preserved_through_noisy_program() {
        let g = heavy_hex_layout(3).unwrap();
        let p = DriveParams::new(1.0, 2.0, 3.0, 6).unwrap();
        let prog = build_program(&g, &color_edges(&g), &p).unwrap();
        let mut psi = StateVector::basis(&"0100110101".parse().unwrap()).unwrap();
        let noise = NoiseSpec::new(0.5, 0.0).unwrap();
        let mut r = rng::stream(3, 3);
        for layer in prog.layers() {
            apply_layer(&mut psi, layer, noise.p2, &mut r);
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn initial_bit_frequency() {
        let mut r = rng::stream(11, 0);
        let draws = 20000;
        let ones: u32 = (0..draws).map(|_| sample_initial(1.0, 1, &mut r).count_ones()).sum();
        let p = 1.0 / (1.0 + (2.0f64).exp());
        let sd = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((ones as f64 / draws as f64 - p).abs() < 3.0 * sd);
        assert_eq!(sample_initial(1e3, 8, &mut r).count_ones(), 0);
    }

    #[test]
    fn basis_state_measures_itself() {
        let z: BitString = "10110".parse().unwrap();
        let psi = StateVector::basis(&z).unwrap();
        let mut r = rng::stream(1, 1);
        for _ in 0..100 {
            assert_eq!(sample_final(&psi, None, &mut r), z);
        }
    }

    #[test]
    fn zero_drive_gives_zero_work() {
        let g = heavy_hex_layout(3).unwrap();
        let p = DriveParams::new(0.5, 1.0, 0.0, 4).unwrap();
        for s in run_tpm(&g, &p, 500, None, 9).unwrap() {
            assert_eq!(s.x, s.y);
        }
        let (w1, w2) = exact_conditional_moments(&g, &p, &"0110100101".parse().unwrap()).unwrap();
        assert!(w1.abs() < 1e-12 && w2.abs() < 1e-12);
    }

    #[test]
    fn noiseless_runs_conserve_parity_and_repeat() {
        let g = heavy_hex_layout(4).unwrap();
        let p = DriveParams::new(0.3, 1.0, 4.0, 5).unwrap();
        let a = run_tpm(&g, &p, 2000, None, 42).unwrap();
        let b = run_tpm(&g, &p, 2000, None, 42).unwrap();
        assert_eq!(a, b);
        let (_, eff) = parity_filter(&a);
        assert_eq!(eff, 1.0);
    }

    #[test]
    fn noisy_runs_repeat() {
        let g = heavy_hex_layout(2).unwrap();
        let p = DriveParams::new(0.3, 1.0, 4.0, 3).unwrap();
        let noise = NoiseSpec::new(0.2, 0.02).unwrap();
        let a = run_tpm(&g, &p, 300, Some(&noise), 5).unwrap();
        let b = run_tpm(&g, &p, 300, Some(&noise), 5).unwrap();
        assert_eq!(a, b);
        let (_, eff) = parity_filter(&a);
        assert!(eff < 1.0);
    }

    #[test]
    fn parity_filter_examples() {
        let s = TpmSample::new("0011".parse().unwrap(), "0110".parse().unwrap()).unwrap();
        let t = TpmSample::new("0011".parse().unwrap(), "0111".parse().unwrap()).unwrap();
        let (kept, eff) = parity_filter(&[s, t]);
        assert_eq!(kept, vec![s]);
        assert_eq!(eff, 0.5);
    }

    #[test]
    fn cap_is_enforced() {
        let g = heavy_hex_layout(5).unwrap();
        let p = DriveParams::new(1.0, 1.0, 1.0, 1).unwrap();
        let err = run_tpm_capped(&g, &p, 1, None, 0, 12).unwrap_err();
        assert!(err.is_resource_cap());
    }

    #[test]
    fn csv_round_trip() {
        let g = heavy_hex_layout(2).unwrap();
        let p = DriveParams::new(0.3, 1.0, 2.0, 2).unwrap();
        let samples = run_tpm(&g, &p, 50, None, 1).unwrap();
        let mut buf = Vec::new();
        write_samples(&samples, &mut buf).unwrap();
        assert!(buf.starts_with(b"x_bits,y_bits\n"));
        let back = read_samples(buf.as_slice(), "mem").unwrap();
        assert_eq!(back, samples);
        let bad = "x_bits,y_bits\n0101,011\n";
        assert!(matches!(read_samples(bad.as_bytes(), "bad.csv"), Err(Error::Parse { line: 2, .. })));
    }
}
