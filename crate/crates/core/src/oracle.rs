//! Brute-force references for small systems.
//!
//! The Trotter unitary here does not go through the gate program: the
//! coupling `V = (1/|E|) Σ X_p X_r` is diagonal after a Walsh–Hadamard
//! transform, so `exp(-iθV)` is applied exactly as transform, phase,
//! transform back.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::Graph;
use crate::protocol::{trotter_weights, DriveParams};
use crate::workstats::{EstimatorTag, WorkStatistics};

pub type DenseOperator = DMatrix<Complex64>;

pub const MAX_DENSE_QUBITS: usize = 12;
pub const MAX_TABLE_QUBITS: usize = 10;
pub const MAX_EXPM_DIM: usize = 2048;
pub const DEFAULT_REFINEMENT: usize = 4096;

const CONTINUUM_TOL: f64 = 1e-9;
const MAX_REFINEMENT: usize = 1 << 22;

fn check_size(n: usize, limit: usize, what: &'static str) -> Result<()> {
    if n > limit {
        return Err(Error::SizeLimit {
            what,
            actual: n,
            limit,
        });
    }
    Ok(())
}

fn diag_energy(index: usize, n: usize) -> f64 {
    2.0 * index.count_ones() as f64 - n as f64
}

/// `H = -Σ Z_q + (λ/|E|) Σ X_p X_r` as a dense matrix.
pub fn dense_hamiltonian(g: &Graph, lambda: f64) -> Result<DenseOperator> {
    let n = g.n_vertices();
    check_size(n, MAX_DENSE_QUBITS, "dense operator qubits")?;
    let dim = 1usize << n;
    let c = lambda / g.n_edges().max(1) as f64;
    let mut h = DenseOperator::zeros(dim, dim);
    for z in 0..dim {
        h[(z, z)] = Complex64::new(diag_energy(z, n), 0.0);
        for &(p, r) in g.edges() {
            h[(z ^ (1 << p) ^ (1 << r), z)] += Complex64::new(c, 0.0);
        }
    }
    Ok(h)
}

fn walsh_hadamard(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}

/// Eigenvalues of `V` on the Hadamard-rotated basis.
fn coupling_spectrum(g: &Graph) -> Vec<f64> {
    let n = g.n_vertices();
    let e = g.n_edges() as f64;
    (0..1usize << n)
        .map(|s| {
            g.edges()
                .iter()
                .map(|&(p, r)| if ((s >> p) ^ (s >> r)) & 1 == 0 { 1.0 } else { -1.0 })
                .sum::<f64>()
                / e
        })
        .collect()
}

struct TrotterFactors {
    half_h0: Vec<Complex64>,
    coupling: Vec<f64>,
    weights: Vec<f64>,
    dt: f64,
}

impl TrotterFactors {
    fn new(g: &Graph, p: &DriveParams) -> Self {
        let n = g.n_vertices();
        let dt = p.dt();
        TrotterFactors {
            half_h0: (0..1usize << n)
                .map(|z| Complex64::from_polar(1.0, -0.5 * dt * diag_energy(z, n)))
                .collect(),
            coupling: coupling_spectrum(g),
            weights: trotter_weights(p),
            dt,
        }
    }

    fn apply(&self, psi: &mut [Complex64], phases: &mut [Complex64]) {
        let norm = 1.0 / psi.len() as f64;
        for &w in &self.weights {
            for (a, d) in psi.iter_mut().zip(&self.half_h0) {
                *a *= d;
            }
            if w != 0.0 {
                for (ph, v) in phases.iter_mut().zip(&self.coupling) {
                    *ph = Complex64::from_polar(norm, -self.dt * w * v);
                }
                walsh_hadamard(psi);
                for (a, ph) in psi.iter_mut().zip(phases.iter()) {
                    *a *= ph;
                }
                walsh_hadamard(psi);
            }
            for (a, d) in psi.iter_mut().zip(&self.half_h0) {
                *a *= d;
            }
        }
    }
}

/// `U = ∏_ℓ e^{-iΔt H₀/2} e^{-iΔt w_ℓ V} e^{-iΔt H₀/2}` as a dense matrix.
pub fn exact_trotter_unitary(g: &Graph, p: &DriveParams) -> Result<DenseOperator> {
    p.validate()?;
    let n = g.n_vertices();
    check_size(n, MAX_DENSE_QUBITS, "dense operator qubits")?;
    if g.n_edges() == 0 {
        return Err(Error::InvalidGraph("drive needs at least one edge".into()));
    }
    let dim = 1usize << n;
    let factors = TrotterFactors::new(g, p);
    let mut u = DenseOperator::identity(dim, dim);
    u.as_mut_slice().par_chunks_mut(dim).for_each(|col| {
        let mut phases = vec![Complex64::new(0.0, 0.0); dim];
        factors.apply(col, &mut phases);
    });
    Ok(u)
}

/// Fine-step reference for the time-ordered evolution.
#[derive(Clone, Debug)]
pub struct Continuum {
    pub unitary: DenseOperator,
    /// Number of steps of the accepted product.
    pub steps: usize,
    /// Frobenius change from the previous (half as many steps) product.
    pub delta: f64,
}

/// Second-order product with `refinement` steps, doubled until successive
/// products differ by less than `1e-9` in Frobenius norm.
pub fn continuum_evolution(g: &Graph, p: &DriveParams, refinement: usize) -> Result<Continuum> {
    if refinement == 0 {
        return Err(Error::InvalidParameter("refinement must be at least 1".into()));
    }
    let at = |steps: usize| exact_trotter_unitary(g, &DriveParams { n_trotter: steps, ..*p });
    let mut steps = refinement;
    let mut prev = at(steps)?;
    let mut delta = f64::INFINITY;
    while steps < MAX_REFINEMENT {
        steps *= 2;
        let next = at(steps)?;
        delta = (&next - &prev).norm();
        prev = next;
        if delta < CONTINUUM_TOL {
            return Ok(Continuum {
                unitary: prev,
                steps,
                delta,
            });
        }
    }
    Err(Error::Convergence {
        what: "continuum evolution",
        residual: delta,
    })
}

/// Product Gibbs probabilities `p_th(z)` of `H₀ = -ΣZ` for all `2^n` basis states.
pub fn gibbs_probabilities(n: usize, beta: f64) -> Vec<f64> {
    // ln P(bit = 1) and ln P(bit = 0), overflow-safe
    let softplus = |t: f64| t.max(0.0) + (-t.abs()).exp().ln_1p();
    let l1 = -softplus(2.0 * beta);
    let l0 = -softplus(-2.0 * beta);
    let by_weight: Vec<f64> = (0..=n)
        .map(|k| (k as f64 * l1 + (n - k) as f64 * l0).exp())
        .collect();
    (0..1usize << n).map(|z| by_weight[z.count_ones() as usize]).collect()
}

/// Transition probabilities `|⟨y|U|x⟩|²`; independent of `β`.
#[derive(Clone, Debug)]
pub struct TransitionTable {
    n_qubits: usize,
    probs: DMatrix<f64>,
}

impl TransitionTable {
    pub fn from_unitary(u: &DenseOperator) -> Result<Self> {
        let dim = u.nrows();
        if dim != u.ncols() || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: u.ncols(),
            });
        }
        Ok(TransitionTable {
            n_qubits: dim.trailing_zeros() as usize,
            probs: u.map(|a| a.norm_sqr()),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `P(y | x)`.
    pub fn prob(&self, y: usize, x: usize) -> f64 {
        self.probs[(y, x)]
    }

    pub fn conditional_moments(&self) -> ConditionalMoments {
        let n = self.n_qubits;
        let (m1, m2) = self
            .probs
            .column_iter()
            .enumerate()
            .map(|(x, col)| {
                let ex = diag_energy(x, n);
                col.iter().enumerate().fold((0.0, 0.0), |(a, b), (y, &pr)| {
                    let w = diag_energy(y, n) - ex;
                    (a + pr * w, b + pr * w * w)
                })
            })
            .unzip();
        ConditionalMoments { n_qubits: n, m1, m2 }
    }

    pub fn distribution(&self, beta: f64) -> TpmDistribution {
        TpmDistribution {
            table: self.clone(),
            p_th: gibbs_probabilities(self.n_qubits, beta),
        }
    }
}

/// `E[W|x]` and `E[W²|x]` for every basis state `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalMoments {
    pub n_qubits: usize,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
}

impl ConditionalMoments {
    /// Unconditional moments for a Gibbs-distributed `x`.
    pub fn moments(&self, beta: f64) -> WorkStatistics {
        let p = gibbs_probabilities(self.n_qubits, beta);
        let mean: f64 = p.iter().zip(&self.m1).map(|(p, m)| p * m).sum();
        let var: f64 = p
            .iter()
            .zip(self.m1.iter().zip(&self.m2))
            .map(|(p, (m1, m2))| p * (m2 - 2.0 * mean * m1 + mean * mean))
            .sum();
        WorkStatistics::new(mean, var, 0, EstimatorTag::Exact)
    }
}

/// Ideal two-point-measurement distribution `p(y, x) = P(y|x) p_th(x)`.
#[derive(Clone, Debug)]
pub struct TpmDistribution {
    table: TransitionTable,
    p_th: Vec<f64>,
}

impl TpmDistribution {
    pub fn n_qubits(&self) -> usize {
        self.table.n_qubits
    }

    pub fn prob(&self, y: usize, x: usize) -> f64 {
        self.table.prob(y, x) * self.p_th[x]
    }

    pub fn initial_probability(&self, x: usize) -> f64 {
        self.p_th[x]
    }

    /// `Σ_y p(y, x)`.
    pub fn marginal_x(&self, x: usize) -> f64 {
        self.table.probs.column(x).sum() * self.p_th[x]
    }

    pub fn total_mass(&self) -> f64 {
        (0..self.p_th.len()).map(|x| self.marginal_x(x)).sum()
    }

    /// Exact mean and variance of the work by direct summation.
    pub fn moments(&self) -> WorkStatistics {
        let n = self.n_qubits();
        let dim = self.p_th.len();
        let work = |y: usize, x: usize| diag_energy(y, n) - diag_energy(x, n);
        let mut mean = 0.0;
        for x in 0..dim {
            for y in 0..dim {
                mean += self.prob(y, x) * work(y, x);
            }
        }
        let mut var = 0.0;
        for x in 0..dim {
            for y in 0..dim {
                let d = work(y, x) - mean;
                var += self.prob(y, x) * d * d;
            }
        }
        WorkStatistics::new(mean, var, 0, EstimatorTag::Exact)
    }
}

/// Exact TPM distribution for the Trotter circuit, or for the fine-step
/// continuum reference when `use_continuum` is set.
pub fn exact_tpm_distribution(g: &Graph, p: &DriveParams, use_continuum: bool) -> Result<TpmDistribution> {
    check_size(g.n_vertices(), MAX_TABLE_QUBITS, "TPM table qubits")?;
    let u = if use_continuum {
        continuum_evolution(g, p, DEFAULT_REFINEMENT)?.unitary
    } else {
        exact_trotter_unitary(g, p)?
    };
    Ok(TransitionTable::from_unitary(&u)?.distribution(p.beta))
}

/// `exp(-iθH)` for Hermitian `H` by full eigendecomposition.
pub fn dense_expm(h: &DenseOperator, theta: f64) -> Result<DenseOperator> {
    let dim = h.nrows();
    if dim != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: h.ncols(),
        });
    }
    check_size(dim, MAX_EXPM_DIM, "dense exponential dimension")?;
    let scale = h.iter().map(|a| a.norm()).fold(0.0, f64::max).max(1.0);
    let skew = (h - h.adjoint()).iter().map(|a| a.norm()).fold(0.0, f64::max);
    if skew > 1e-12 * scale {
        return Err(Error::InvalidParameter(format!(
            "dense_expm needs a Hermitian matrix (max |H - H†| = {skew:.3e})"
        )));
    }
    let eig = h.clone().symmetric_eigen();
    let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -theta * l));
    let mut scaled = eig.eigenvectors.clone();
    for (j, ph) in phases.iter().enumerate() {
        for a in scaled.column_mut(j).iter_mut() {
            *a *= ph;
        }
    }
    Ok(scaled * eig.eigenvectors.adjoint())
}

/// `‖U†U - I‖_F`.
pub fn unitarity_defect(u: &DenseOperator) -> f64 {
    let dim = u.ncols();
    (u.adjoint() * u - DenseOperator::identity(dim, dim)).norm()
}

/// Writes `rows`, `cols` as little-endian u64, then the entries row-major as
/// little-endian `(re, im)` f64 pairs.
pub fn write_dump<W: Write>(m: &DenseOperator, mut out: W) -> Result<()> {
    out.write_all(&(m.nrows() as u64).to_le_bytes())?;
    out.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let a = m[(i, j)];
            out.write_all(&a.re.to_le_bytes())?;
            out.write_all(&a.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_dump<R: Read>(mut input: R) -> Result<DenseOperator> {
    let mut word = [0u8; 8];
    let mut next = |input: &mut R| -> Result<[u8; 8]> {
        input.read_exact(&mut word)?;
        Ok(word)
    };
    let rows = u64::from_le_bytes(next(&mut input)?) as usize;
    let cols = u64::from_le_bytes(next(&mut input)?) as usize;
    check_size(rows.saturating_mul(cols), 1 << 26, "dump entries")?;
    let mut m = DenseOperator::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let re = f64::from_le_bytes(next(&mut input)?);
            let im = f64::from_le_bytes(next(&mut input)?);
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

pub fn save_dump(path: &Path, m: &DenseOperator) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_dump(m, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_dump(path: &Path) -> Result<DenseOperator> {
    read_dump(std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::heavy_hex_fragment;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hamiltonian_examples() {
        let h = dense_hamiltonian(&Graph::path(2).unwrap(), 0.0).unwrap();
        assert_eq!(h[(0, 0)], c(-2.0));
        assert_eq!(h[(3, 3)], c(2.0));
        let h = dense_hamiltonian(&Graph::path(2).unwrap(), 1.0).unwrap();
        assert_eq!(h[(3, 0)], c(1.0));
        assert_eq!(h[(1, 2)], c(1.0));
        assert_eq!(h[(1, 0)], c(0.0));
        let h = dense_hamiltonian(&heavy_hex_fragment(5).unwrap(), 1.3).unwrap();
        for i in 0..32usize {
            for j in 0..32usize {
                if (i.count_ones() ^ j.count_ones()) & 1 == 1 {
                    assert_eq!(h[(i, j)], c(0.0));
                }
            }
        }
        assert!(dense_hamiltonian(&heavy_hex_fragment(13).unwrap(), 1.0).is_err());
    }

    #[test]
    fn expm_examples() {
        let z = DenseOperator::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(-1.0)]));
        let u = dense_expm(&z, 0.7).unwrap();
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, -0.7)).norm() < 1e-14);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, 0.7)).norm() < 1e-14);
        let h = dense_hamiltonian(&heavy_hex_fragment(4).unwrap(), 0.9).unwrap();
        let id = dense_expm(&h, 0.0).unwrap();
        assert!((id - DenseOperator::identity(16, 16)).norm() < 1e-13);
        let mut bad = z.clone();
        bad[(0, 1)] = c(1.0);
        assert!(dense_expm(&bad, 1.0).is_err());
    }

    #[test]
    fn hadamard_coupling_matches_eigendecomposition() {
        for size in [2, 4, 6] {
            let g = heavy_hex_fragment(size).unwrap();
            let v = dense_hamiltonian(&g, 1.0).unwrap() - dense_hamiltonian(&g, 0.0).unwrap();
            let theta = 0.83;
            let want = dense_expm(&v, theta).unwrap();
            let dim = 1 << size;
            let spec = coupling_spectrum(&g);
            let mut got = DenseOperator::identity(dim, dim);
            for col in got.as_mut_slice().chunks_mut(dim) {
                walsh_hadamard(col);
                for (a, l) in col.iter_mut().zip(&spec) {
                    *a *= Complex64::from_polar(1.0 / dim as f64, -theta * l);
                }
                walsh_hadamard(col);
            }
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn trotter_unitary_against_dense_factors() {
        let g = heavy_hex_fragment(5).unwrap();
        let p = DriveParams::new(1.0, 1.3, 2.1, 4).unwrap();
        let h0 = dense_hamiltonian(&g, 0.0).unwrap();
        let v = dense_hamiltonian(&g, 1.0).unwrap() - &h0;
        let half = dense_expm(&h0, p.dt() / 2.0).unwrap();
        let mut want = DenseOperator::identity(32, 32);
        for w in trotter_weights(&p) {
            want = &half * dense_expm(&v, p.dt() * w).unwrap() * &half * want;
        }
        let got = exact_trotter_unitary(&g, &p).unwrap();
        assert!((got.clone() - want).norm() < 1e-12);
        assert!(unitarity_defect(&got) < 1e-12);
    }

    #[test]
    fn zero_drive_is_diagonal() {
        let g = heavy_hex_fragment(4).unwrap();
        let p = DriveParams::new(1.0, 0.9, 0.0, 3).unwrap();
        let u = exact_trotter_unitary(&g, &p).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                if i != j {
                    assert_eq!(u[(i, j)].norm(), 0.0);
                }
            }
            let want = Complex64::from_polar(1.0, -0.9 * diag_energy(i, 4));
            assert!((u[(i, i)] - want).norm() < 1e-13);
        }
        let cont = continuum_evolution(&g, &p, 8).unwrap();
        assert!((cont.unitary - u).norm() < 1e-13);
        let d = exact_tpm_distribution(&g, &p, false).unwrap();
        let m = d.moments();
        assert!(m.mean.abs() < 1e-15 && m.variance.abs() < 1e-15);
    }

    #[test]
    fn distribution_is_normalised_with_gibbs_marginal() {
        let g = heavy_hex_fragment(6).unwrap();
        let p = DriveParams::new(0.7, 1.0, 2.0, 5).unwrap();
        let d = exact_tpm_distribution(&g, &p, false).unwrap();
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
        let p_th = gibbs_probabilities(6, 0.7);
        for (x, &q) in p_th.iter().enumerate() {
            assert!((d.marginal_x(x) - q).abs() < 1e-13);
        }
        let table = TransitionTable::from_unitary(&exact_trotter_unitary(&g, &p).unwrap()).unwrap();
        let by_x = table.conditional_moments().moments(0.7);
        let direct = d.moments();
        assert!((by_x.mean - direct.mean).abs() < 1e-12);
        assert!((by_x.variance - direct.variance).abs() < 1e-12);
        assert!(direct.mean > -1e-10);
    }

    #[test]
    fn gibbs_probabilities_are_stable() {
        let p = gibbs_probabilities(3, 400.0);
        assert_eq!(p[0], 1.0);
        assert!(p[1..].iter().all(|&q| q == 0.0));
        let s: f64 = gibbs_probabilities(8, 0.3).iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dump_round_trip() {
        let g = heavy_hex_fragment(3).unwrap();
        let p = DriveParams::new(1.0, 1.0, 1.0, 2).unwrap();
        let u = exact_trotter_unitary(&g, &p).unwrap();
        let mut buf = Vec::new();
        write_dump(&u, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 64 * 16);
        assert_eq!(&buf[..8], &8u64.to_le_bytes());
        let back = read_dump(buf.as_slice()).unwrap();
        assert_eq!(back, u);
        assert!(read_dump(&buf[..100]).is_err());
    }
}
