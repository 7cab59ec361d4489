//! Sample-based post-processing: recompute the work distribution from the
//! dynamics projected onto the span of the sampled bitstrings.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::lattice::Graph;
use crate::protocol::{trotter_weights, DriveParams};
use crate::sim::TpmSample;
use crate::workstats::{energy_of, EstimatorTag, WorkStatistics};

pub const DEFAULT_MAX_SUBSPACE: usize = 32_000;
pub const DEFAULT_DELTA: f64 = 1e-3;
/// Largest subspace for which [`evolve_subspace`] materializes `T`.
pub const MAX_DENSE_T: usize = 8192;

/// Tolerance of one exponential action, in L2 norm for a unit input.
pub const ACTION_TOL: f64 = 1e-10;
const KRYLOV_MAX_DIM: usize = 40;
const TAYLOR_MAX_M: usize = 8;
/// Columns whose combined normalized Gibbs weight is below this are skipped.
const NEGLIGIBLE_MASS: f64 = 1e-14;

/// Ordered set of distinct bitstrings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Subspace {
    basis: Vec<BitString>,
    index_of: HashMap<BitString, usize>,
}

impl Subspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `z` if absent; returns its position.
    pub fn insert(&mut self, z: BitString) -> usize {
        if let Some(&i) = self.index_of.get(&z) {
            return i;
        }
        if let Some(first) = self.basis.first() {
            assert_eq!(first.len(), z.len(), "bitstring length mismatch in subspace");
        }
        self.basis.push(z);
        self.index_of.insert(z, self.basis.len() - 1);
        self.basis.len() - 1
    }

    pub fn from_bitstrings<I: IntoIterator<Item = BitString>>(iter: I) -> Self {
        let mut s = Subspace::new();
        for z in iter {
            s.insert(z);
        }
        s
    }

    /// All `2^n` bitstrings in index order.
    pub fn full(n: usize) -> Self {
        Self::from_bitstrings((0..1usize << n).map(|i| BitString::from_index(i, n)))
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[BitString] {
        &self.basis
    }

    pub fn index_of(&self, z: &BitString) -> Option<usize> {
        self.index_of.get(z).copied()
    }

    pub fn contains(&self, z: &BitString) -> bool {
        self.index_of.contains_key(z)
    }

    pub fn n_qubits(&self) -> usize {
        self.basis.first().map_or(0, |z| z.len())
    }
}

/// `S = {x_k} ∪ {y_k}` in order of first appearance.
pub fn build_subspace(samples: &[TpmSample]) -> Result<Subspace> {
    if samples.is_empty() {
        return Err(Error::Empty("no samples to build a subspace from"));
    }
    Ok(Subspace::from_bitstrings(samples.iter().flat_map(|s| [s.x, s.y])))
}

/// Real symmetric matrix in compressed sparse row form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymmetric {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSymmetric {
    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("entry exists") += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseSymmetric {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(col, value)` pairs of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn mul_vec(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).map(|(c, a)| v[c] * a).sum();
        }
    }

    /// Max absolute row sum, an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).map(|(_, a)| a.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, a) in self.row(r) {
                m[(r, c)] += a;
            }
        }
        m
    }
}

/// `Ẽ` and `Ṽ`: `H₀` and `V` restricted to a subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedOperators {
    pub e_diag: Vec<f64>,
    pub v: SparseSymmetric,
}

pub fn project_operators(g: &Graph, s: &Subspace) -> Result<ProjectedOperators> {
    let n = g.n_vertices();
    if let Some(z) = s.basis().iter().find(|z| z.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: z.len(),
        });
    }
    if g.n_edges() == 0 {
        return Err(Error::InvalidGraph("drive needs at least one edge".into()));
    }
    let c = 1.0 / g.n_edges() as f64;
    let triplets: Vec<(usize, usize, f64)> = s
        .basis()
        .par_iter()
        .enumerate()
        .flat_map_iter(|(m, z)| {
            g.edges()
                .iter()
                .filter_map(move |&(p, r)| s.index_of(&z.flipped_pair(p, r)).map(|k| (m, k, c)))
        })
        .collect();
    Ok(ProjectedOperators {
        e_diag: s.basis().iter().map(energy_of).collect(),
        v: SparseSymmetric::from_triplets(s.len(), triplets),
    })
}

struct Workspace {
    krylov: Vec<Vec<Complex64>>,
    w: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        Workspace {
            krylov: Vec::new(),
            w: vec![Complex64::new(0.0, 0.0); dim],
            tmp: vec![Complex64::new(0.0, 0.0); dim],
        }
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Lanczos approximation of `exp(-iθA) v`; `None` if `KRYLOV_MAX_DIM` does
/// not reach the tolerance.
fn lanczos_step(a: &SparseSymmetric, theta: f64, v: &mut [Complex64], ws: &mut Workspace, tol: f64) -> Option<()> {
    let beta0 = norm(v);
    if beta0 == 0.0 {
        return Some(());
    }
    let dim = v.len();
    let max_m = KRYLOV_MAX_DIM.min(dim);
    while ws.krylov.len() < max_m {
        ws.krylov.push(vec![Complex64::new(0.0, 0.0); dim]);
    }
    for (q, x) in ws.krylov[0].iter_mut().zip(v.iter()) {
        *q = x / beta0;
    }
    let mut alpha = Vec::with_capacity(max_m);
    let mut off: Vec<f64> = Vec::with_capacity(max_m);
    for j in 0..max_m {
        a.mul_vec(&ws.krylov[j], &mut ws.w);
        let aj = dot(&ws.krylov[j], &ws.w).re;
        alpha.push(aj);
        for (w, q) in ws.w.iter_mut().zip(&ws.krylov[j]) {
            *w -= q * aj;
        }
        if j > 0 {
            let b = off[j - 1];
            for (w, q) in ws.w.iter_mut().zip(&ws.krylov[j - 1]) {
                *w -= q * b;
            }
        }
        for k in 0..=j {
            let c = dot(&ws.krylov[k], &ws.w);
            for (w, q) in ws.w.iter_mut().zip(&ws.krylov[k]) {
                *w -= q * c;
            }
        }
        let b = norm(&ws.w);
        let m = j + 1;
        let y = tridiagonal_exp_e1(&alpha, &off, theta);
        let err = beta0 * b * y[m - 1].norm();
        let breakdown = b <= 1e-13 * (1.0 + aj.abs());
        if breakdown || err <= tol * beta0 || m == dim {
            for x in v.iter_mut() {
                *x = Complex64::new(0.0, 0.0);
            }
            for (k, yk) in y.iter().enumerate() {
                let s = yk * beta0;
                for (x, q) in v.iter_mut().zip(&ws.krylov[k]) {
                    *x += q * s;
                }
            }
            return Some(());
        }
        if m == max_m {
            return None;
        }
        off.push(b);
        for (q, w) in ws.krylov[j + 1].iter_mut().zip(&ws.w) {
            *q = w / b;
        }
    }
    None
}

/// First column of `exp(-iθT)` for the symmetric tridiagonal `T`.
fn tridiagonal_exp_e1(alpha: &[f64], off: &[f64], theta: f64) -> Vec<Complex64> {
    let m = alpha.len();
    if m == 1 {
        return vec![Complex64::from_polar(1.0, -theta * alpha[0])];
    }
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = off[i];
            t[(i + 1, i)] = off[i];
        }
    }
    let eig = t.symmetric_eigen();
    let q = &eig.eigenvectors;
    (0..m)
        .map(|k| {
            (0..m)
                .map(|l| Complex64::from_polar(q[(k, l)] * q[(0, l)], -theta * eig.eigenvalues[l]))
                .sum()
        })
        .collect()
}

/// Scaled Taylor series with a remainder bound, for very small matrices.
fn taylor_action(a: &SparseSymmetric, theta: f64, v: &mut [Complex64], ws: &mut Workspace, tol: f64) {
    let bound = a.norm_inf() * theta.abs();
    let steps = (bound / 0.5).ceil().max(1.0) as usize;
    let h = theta / steps as f64;
    let hn = bound / steps as f64;
    let factor = Complex64::new(0.0, -h);
    for _ in 0..steps {
        ws.tmp.copy_from_slice(v);
        let mut k = 0usize;
        // term_k = (-ihA)^k v / k!, remainder ≤ hn^{k+1}/(k+1)! e^{hn} ‖v‖
        let mut rem = hn * hn.exp();
        while rem > tol / steps as f64 && k < 60 {
            k += 1;
            a.mul_vec(&ws.tmp, &mut ws.w);
            let scale = factor / k as f64;
            for (t, w) in ws.tmp.iter_mut().zip(&ws.w) {
                *t = w * scale;
            }
            for (x, t) in v.iter_mut().zip(&ws.tmp) {
                *x += t;
            }
            rem *= hn / (k + 1) as f64;
        }
    }
}

/// `v ← exp(-iθA) v` to within [`ACTION_TOL`] per unit of `‖v‖`.
fn expm_action(a: &SparseSymmetric, theta: f64, v: &mut [Complex64], ws: &mut Workspace) -> Result<()> {
    if theta == 0.0 || a.nnz() == 0 {
        return Ok(());
    }
    if a.dim() <= TAYLOR_MAX_M {
        taylor_action(a, theta, v, ws, ACTION_TOL);
        return Ok(());
    }
    let mut done = 0.0;
    let mut step = theta;
    let mut halvings = 0;
    let mut backup = v.to_vec();
    while (theta - done).abs() > 0.0 {
        let h = if (theta - done).abs() < step.abs() { theta - done } else { step };
        let tol = ACTION_TOL * (h / theta).abs();
        match lanczos_step(a, h, v, ws, tol) {
            Some(()) => {
                done += h;
                backup.copy_from_slice(v);
            }
            None => {
                v.copy_from_slice(&backup);
                step /= 2.0;
                halvings += 1;
                if halvings > 40 {
                    return Err(Error::Convergence {
                        what: "Krylov exponential action",
                        residual: step.abs(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Public entry for `exp(-iθA) v` on a sparse symmetric matrix.
pub fn expm_multiply(a: &SparseSymmetric, theta: f64, v: &[Complex64]) -> Result<Vec<Complex64>> {
    if v.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: v.len(),
        });
    }
    let mut out = v.to_vec();
    let mut ws = Workspace::new(a.dim());
    expm_action(a, theta, &mut out, &mut ws)?;
    Ok(out)
}

struct Propagator<'a> {
    ops: &'a ProjectedOperators,
    half_phase: Vec<Complex64>,
    thetas: Vec<f64>,
}

impl<'a> Propagator<'a> {
    fn new(ops: &'a ProjectedOperators, p: &DriveParams) -> Self {
        let dt = p.dt();
        Propagator {
            ops,
            half_phase: ops
                .e_diag
                .iter()
                .map(|e| Complex64::from_polar(1.0, -0.5 * dt * e))
                .collect(),
            thetas: trotter_weights(p).into_iter().map(|w| dt * w).collect(),
        }
    }

    /// Column `n` of `T`.
    fn column(&self, n: usize, ws: &mut Workspace) -> Result<Vec<Complex64>> {
        let mut psi = vec![Complex64::new(0.0, 0.0); self.half_phase.len()];
        psi[n] = Complex64::new(1.0, 0.0);
        for &theta in &self.thetas {
            for (a, ph) in psi.iter_mut().zip(&self.half_phase) {
                *a *= ph;
            }
            expm_action(&self.ops.v, theta, &mut psi, ws)?;
            for (a, ph) in psi.iter_mut().zip(&self.half_phase) {
                *a *= ph;
            }
        }
        Ok(psi)
    }
}

/// Projected Trotter product `T` as a dense `M × M` matrix.
pub fn evolve_subspace(ops: &ProjectedOperators, p: &DriveParams) -> Result<DMatrix<Complex64>> {
    p.validate()?;
    let m = ops.e_diag.len();
    if m == 0 {
        return Err(Error::Empty("subspace"));
    }
    if m > MAX_DENSE_T {
        return Err(Error::SizeLimit {
            what: "dense subspace propagator",
            actual: m,
            limit: MAX_DENSE_T,
        });
    }
    let prop = Propagator::new(ops, p);
    let cols: Vec<Vec<Complex64>> = (0..m)
        .into_par_iter()
        .map_init(|| Workspace::new(m), |ws, n| prop.column(n, ws))
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(m, m, |i, j| cols[j][i]))
}

/// Work statistics recomputed on a subspace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqtEstimate {
    pub stats: WorkStatistics,
    pub subspace_dim: usize,
    /// `Σ_{z ∈ S} p_th(z)` under the full product Gibbs state.
    pub gibbs_mass_captured: f64,
    /// `Σ_{mn} p̃_mn`; 1 up to the exponential-action tolerance.
    pub total_probability: f64,
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Fraction of the full Gibbs measure carried by `s`.
pub fn gibbs_mass(s: &Subspace, beta: f64) -> f64 {
    let logs: Vec<f64> = s.basis().iter().map(|z| -beta * energy_of(z)).collect();
    let n = s.n_qubits() as f64;
    // ln Z = n ln(2 cosh β)
    let log_z = n * (beta.abs() + (-2.0 * beta.abs()).exp().ln_1p());
    (log_sum_exp(&logs) - log_z).exp().min(1.0)
}

/// SQT estimate on subspace `s`, streamed column by column. The returned
/// statistics carry `n_samples = 0`; the sample-based entry points fill it in.
pub fn sqt_estimate(g: &Graph, s: &Subspace, p: &DriveParams) -> Result<SqtEstimate> {
    sqt_estimate_tagged(g, s, p, EstimatorTag::Sqt)
}

fn sqt_estimate_tagged(g: &Graph, s: &Subspace, p: &DriveParams, tag: EstimatorTag) -> Result<SqtEstimate> {
    p.validate()?;
    if s.is_empty() {
        return Err(Error::Empty("subspace"));
    }
    let ops = project_operators(g, s)?;
    let m = s.len();
    let logs: Vec<f64> = ops.e_diag.iter().map(|e| -p.beta * e).collect();
    let log_z = log_sum_exp(&logs);
    let weights: Vec<f64> = logs.iter().map(|l| (l - log_z).exp()).collect();

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let mut tail = 0.0;
    let mut keep = m;
    for (i, &col) in order.iter().enumerate().rev() {
        if tail + weights[col] > NEGLIGIBLE_MASS {
            keep = i + 1;
            break;
        }
        tail += weights[col];
    }
    let mut cols: Vec<usize> = order[..keep].to_vec();
    cols.sort_unstable();

    let prop = Propagator::new(&ops, p);
    let e = &ops.e_diag;
    let sums: Vec<[f64; 3]> = cols
        .par_iter()
        .map_init(
            || Workspace::new(m),
            |ws, &n| -> Result<[f64; 3]> {
                let col = prop.column(n, ws)?;
                let mut acc = [0.0; 3];
                for (mi, a) in col.iter().enumerate() {
                    let pr = a.norm_sqr();
                    let w = e[mi] - e[n];
                    acc[0] += pr;
                    acc[1] += pr * w;
                    acc[2] += pr * w * w;
                }
                Ok(acc.map(|x| x * weights[n]))
            },
        )
        .collect::<Result<_>>()?;
    let [s0, s1, s2] = sums
        .iter()
        .fold([0.0; 3], |t, c| [t[0] + c[0], t[1] + c[1], t[2] + c[2]]);
    let mean = s1;
    let variance = s2 - 2.0 * mean * s1 + mean * mean * s0;
    Ok(SqtEstimate {
        stats: WorkStatistics::new(mean, variance, 0, tag),
        subspace_dim: m,
        gibbs_mass_captured: gibbs_mass(s, p.beta),
        total_probability: s0,
    })
}

/// Keeps the minimal highest-Gibbs-weight prefix holding `1 - delta` of the
/// mass within `s`. Ties keep insertion order; `delta = 0` keeps everything.
pub fn prune(s: &Subspace, beta: f64, delta: f64) -> Result<Subspace> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!("delta must lie in [0, 1), got {delta}")));
    }
    let logs: Vec<f64> = s.basis().iter().map(|z| -beta * energy_of(z)).collect();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| logs[b].total_cmp(&logs[a]));
    if delta == 0.0 {
        return Ok(Subspace::from_bitstrings(order.iter().map(|&i| s.basis()[i])));
    }
    let log_z = log_sum_exp(&logs);
    let mut acc = 0.0;
    let mut kept = Subspace::new();
    for &i in &order {
        kept.insert(s.basis()[i]);
        acc += (logs[i] - log_z).exp();
        if acc >= 1.0 - delta {
            break;
        }
    }
    Ok(kept)
}

/// `C` followed by every `x ⊕ e_p ⊕ e_r` for `x ∈ C` and `(p, r) ∈ E`.
pub fn extend(c: &Subspace, g: &Graph) -> Subspace {
    let mut out = c.clone();
    for x in c.basis() {
        for &(p, r) in g.edges() {
            out.insert(x.flipped_pair(p, r));
        }
    }
    out
}

/// Options of the extended estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtSqtOptions {
    pub delta: f64,
    pub max_dim: usize,
}

impl Default for ExtSqtOptions {
    fn default() -> Self {
        ExtSqtOptions {
            delta: DEFAULT_DELTA,
            max_dim: DEFAULT_MAX_SUBSPACE,
        }
    }
}

/// Build, prune, extend, then estimate. Samples should already be
/// parity-filtered.
pub fn ext_sqt_estimate(g: &Graph, samples: &[TpmSample], p: &DriveParams, delta: f64) -> Result<SqtEstimate> {
    ext_sqt_estimate_with(
        g,
        samples,
        p,
        ExtSqtOptions {
            delta,
            ..Default::default()
        },
    )
}

pub fn ext_sqt_estimate_with(
    g: &Graph,
    samples: &[TpmSample],
    p: &DriveParams,
    opts: ExtSqtOptions,
) -> Result<SqtEstimate> {
    let s = build_subspace(samples)?;
    let c = prune(&s, p.beta, opts.delta)?;
    let ext = extend(&c, g);
    check_cap(ext.len(), opts.max_dim)?;
    let mut est = sqt_estimate_tagged(g, &ext, p, EstimatorTag::ExtSqt)?;
    est.stats.n_samples = samples.len();
    Ok(est)
}

/// Plain SQT on the sample subspace, with a size cap.
pub fn sqt_from_samples(g: &Graph, samples: &[TpmSample], p: &DriveParams, max_dim: usize) -> Result<SqtEstimate> {
    let s = build_subspace(samples)?;
    check_cap(s.len(), max_dim)?;
    let mut est = sqt_estimate(g, &s, p)?;
    est.stats.n_samples = samples.len();
    Ok(est)
}

fn check_cap(m: usize, limit: usize) -> Result<()> {
    if m > limit {
        return Err(Error::SizeLimit {
            what: "subspace dimension",
            actual: m,
            limit,
        });
    }
    Ok(())
}

/// Dense `exp(-iθA)` of a real symmetric matrix, for checking the sparse action.
pub fn dense_symmetric_expm(a: &DMatrix<f64>, theta: f64) -> DMatrix<Complex64> {
    let eig = a.clone().symmetric_eigen();
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|l| Complex64::from_polar(1.0, -theta * l)),
    );
    let q = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    &q * DMatrix::from_diagonal(&phases) * q.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{heavy_hex_fragment, heavy_hex_layout};
    use crate::oracle::{exact_trotter_unitary, TransitionTable};
    use crate::rng;
    use crate::sim::run_tpm;
    use rand::Rng as _;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn sample(x: &str, y: &str) -> TpmSample {
        TpmSample::new(bs(x), bs(y)).unwrap()
    }

    #[test]
    fn subspace_examples() {
        assert_eq!(build_subspace(&[sample("00", "00")]).unwrap().len(), 1);
        let s = build_subspace(&[sample("00", "11"), sample("11", "00")]).unwrap();
        assert_eq!(s.basis(), &[bs("00"), bs("11")]);
        assert!(build_subspace(&[]).is_err());
    }

    #[test]
    fn projection_of_single_edge() {
        let g = Graph::path(2).unwrap();
        let s = Subspace::from_bitstrings([bs("00"), bs("11")]);
        let ops = project_operators(&g, &s).unwrap();
        assert_eq!(ops.v.to_dense(), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(ops.e_diag, vec![-2.0, 2.0]);
        let bad = Subspace::from_bitstrings([bs("000")]);
        assert!(project_operators(&g, &bad).is_err());
    }

    #[test]
    fn projection_structure() {
        let g = heavy_hex_layout(3).unwrap();
        let mut r = rng::stream(4, 0);
        let s = Subspace::from_bitstrings((0..300).map(|_| {
            BitString::from_bits(&(0..10).map(|_| r.random::<bool>()).collect::<Vec<_>>())
        }));
        let ops = project_operators(&g, &s).unwrap();
        let d = ops.v.to_dense();
        let e = g.n_edges() as f64;
        assert_eq!(d, d.transpose());
        for i in 0..s.len() {
            assert_eq!(d[(i, i)], 0.0);
            assert!(ops.v.row(i).count() <= g.n_edges());
            assert!(ops.v.row(i).all(|(_, a)| a == 1.0 / e));
        }
    }

    fn random_sparse(dim: usize, per_row: usize, seed: u64) -> SparseSymmetric {
        let mut r = rng::stream(seed, 0);
        let mut t = Vec::new();
        for i in 0..dim {
            for _ in 0..per_row {
                let j = r.random_range(0..dim);
                if i != j {
                    let a = r.random_range(-1.0..1.0);
                    t.push((i, j, a));
                    t.push((j, i, a));
                }
            }
        }
        SparseSymmetric::from_triplets(dim, t)
    }

    #[test]
    fn krylov_matches_dense_exponential() {
        let mut r = rng::stream(8, 1);
        for trial in 0..5 {
            let a = random_sparse(200, 3, trial);
            let dense = a.to_dense();
            assert_eq!(dense, dense.transpose());
            for theta in [0.05, 0.7, 3.0, -2.0] {
                let v: Vec<Complex64> = (0..200)
                    .map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
                    .collect();
                let got = expm_multiply(&a, theta, &v).unwrap();
                let want = dense_symmetric_expm(&dense, theta) * DVector::from_vec(v.clone());
                let err: f64 = got.iter().zip(want.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
                assert!(err < 1e-8 * norm(&v), "theta {theta}: {err}");
            }
        }
    }

    #[test]
    fn taylor_path_is_accurate() {
        let a = random_sparse(6, 2, 3);
        let v: Vec<Complex64> = (0..6).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let got = expm_multiply(&a, 1.3, &v).unwrap();
        let want = dense_symmetric_expm(&a.to_dense(), 1.3) * DVector::from_vec(v.clone());
        let err: f64 = got.iter().zip(want.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-10 * norm(&v));
    }

    #[test]
    fn full_basis_propagator_is_the_trotter_unitary() {
        let g = heavy_hex_fragment(5).unwrap();
        let p = DriveParams::new(0.7, 1.4, 2.5, 6).unwrap();
        let s = Subspace::full(5);
        let t = evolve_subspace(&project_operators(&g, &s).unwrap(), &p).unwrap();
        let u = exact_trotter_unitary(&g, &p).unwrap();
        assert!((&t - &u).norm() < 1e-8);
    }

    #[test]
    fn propagator_is_unitary_on_subspace() {
        let g = heavy_hex_layout(4).unwrap();
        let p = DriveParams::new(0.3, 1.0, 3.0, 5).unwrap();
        let samples = run_tpm(&g, &p, 200, None, 3).unwrap();
        let s = build_subspace(&samples).unwrap();
        let t = evolve_subspace(&project_operators(&g, &s).unwrap(), &p).unwrap();
        let m = s.len();
        assert!((t.adjoint() * &t - DMatrix::identity(m, m)).norm() < 1e-8);
    }

    #[test]
    fn zero_drive_and_single_state() {
        let g = heavy_hex_fragment(4).unwrap();
        let p = DriveParams::new(0.7, 1.0, 0.0, 3).unwrap();
        let s = Subspace::full(4);
        let t = evolve_subspace(&project_operators(&g, &s).unwrap(), &p).unwrap();
        for i in 0..16 {
            assert!((t[(i, i)].norm() - 1.0).abs() < 1e-14);
        }
        let est = sqt_estimate(&g, &s, &p).unwrap();
        assert!(est.stats.mean.abs() < 1e-14 && est.stats.variance.abs() < 1e-14);
        let one = Subspace::from_bitstrings([bs("0110")]);
        let p = DriveParams::new(0.7, 1.0, 2.0, 3).unwrap();
        let est = sqt_estimate(&g, &one, &p).unwrap();
        assert_eq!((est.stats.mean, est.stats.variance), (0.0, 0.0));
        assert!((est.total_probability - 1.0).abs() < 1e-14);
    }

    #[test]
    fn full_basis_estimate_matches_oracle() {
        let g = heavy_hex_fragment(6).unwrap();
        for (beta, tau, gamma) in [(1.0, 1.0, 1.0), (0.2, 2.3, 3.0), (5.0, 0.6, 1.5)] {
            let p = DriveParams::new(beta, tau, gamma, 7).unwrap();
            let est = sqt_estimate(&g, &Subspace::full(6), &p).unwrap();
            let table = TransitionTable::from_unitary(&exact_trotter_unitary(&g, &p).unwrap()).unwrap();
            let exact = table.conditional_moments().moments(beta);
            assert!((est.stats.mean - exact.mean).abs() < 1e-8);
            assert!((est.stats.variance - exact.variance).abs() < 1e-8);
            assert!((est.gibbs_mass_captured - 1.0).abs() < 1e-12);
            assert!((est.total_probability - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn nested_subspaces_approach_exact_moments() {
        // S_k = first k bitstrings by Gibbs weight at β = 1
        let g = heavy_hex_fragment(6).unwrap();
        let p = DriveParams::new(1.0, 1.0, 2.0, 6).unwrap();
        let full = prune(&Subspace::full(6), 1.0, 0.0).unwrap();
        let table = TransitionTable::from_unitary(&exact_trotter_unitary(&g, &p).unwrap()).unwrap();
        let exact = table.conditional_moments().moments(1.0);
        let mut prev = f64::INFINITY;
        for k in [1usize, 7, 22, 42, 64] {
            let s = Subspace::from_bitstrings(full.basis()[..k].iter().copied());
            let err = (sqt_estimate(&g, &s, &p).unwrap().stats.mean - exact.mean).abs();
            assert!(err <= prev + 1e-12, "k = {k}: {err} after {prev}");
            prev = err;
        }
        assert!(prev < 1e-8);
    }

    #[test]
    fn prune_examples() {
        let s = Subspace::from_bitstrings([bs("0110"), bs("0000"), bs("1111"), bs("0100")]);
        let all = prune(&s, 1.0, 0.0).unwrap();
        assert_eq!(all.basis(), &[bs("0000"), bs("0100"), bs("0110"), bs("1111")]);
        let cold = prune(&s, 50.0, 1e-9).unwrap();
        assert_eq!(cold.basis(), &[bs("0000")]);

        let states: Vec<BitString> = ["1100", "0000", "1000", "1110", "0001", "0110", "1111", "0101"]
            .iter()
            .map(|z| bs(z))
            .collect();
        let s = Subspace::from_bitstrings(states.iter().copied());
        // weights e^{-E}: E = -4 once, -2 twice, 0 three times, 2 once, 4 once
        let w = |z: &BitString| (-energy_of(z)).exp();
        let total: f64 = states.iter().map(w).sum();
        let mut sorted = states.clone();
        sorted.sort_by(|a, b| w(b).total_cmp(&w(a)));
        let mut acc = 0.0;
        let mut k = 0;
        while acc < (1.0 - 1e-3) * total {
            acc += w(&sorted[k]);
            k += 1;
        }
        let pruned = prune(&s, 1.0, 1e-3).unwrap();
        assert_eq!(pruned.len(), k);
        assert_eq!(pruned.basis(), &sorted[..k]);
        assert!(prune(&s, 1.0, 1.0).is_err());
    }

    #[test]
    fn extend_examples() {
        let g = Graph::path(2).unwrap();
        let c = Subspace::from_bitstrings([bs("00")]);
        assert_eq!(extend(&c, &g).basis(), &[bs("00"), bs("11")]);
        let g = heavy_hex_layout(5).unwrap();
        let x = BitString::zeros(19);
        let ext = extend(&Subspace::from_bitstrings([x]), &g);
        assert_eq!(ext.len(), g.n_edges() + 1);
        let ops = project_operators(&g, &ext).unwrap();
        for i in 0..ext.len() {
            assert!(ops.v.row(i).count() >= 1);
        }
    }

    #[test]
    fn ext_sqt_cap() {
        let g = heavy_hex_layout(3).unwrap();
        let p = DriveParams::new(0.1, 1.0, 1.0, 3).unwrap();
        let samples = run_tpm(&g, &p, 200, None, 1).unwrap();
        let opts = ExtSqtOptions {
            delta: 0.0,
            max_dim: 10,
        };
        assert!(ext_sqt_estimate_with(&g, &samples, &p, opts).unwrap_err().is_resource_cap());
    }

    #[test]
    fn ext_sqt_converges_with_exhaustive_samples() {
        let g = heavy_hex_fragment(6).unwrap();
        let p = DriveParams::new(0.5, 1.0, 1.5, 5).unwrap();
        let samples: Vec<TpmSample> = (0..64)
            .map(|i| {
                let z = BitString::from_index(i, 6);
                TpmSample { x: z, y: z }
            })
            .collect();
        let est = ext_sqt_estimate(&g, &samples, &p, 0.0).unwrap();
        let table = TransitionTable::from_unitary(&exact_trotter_unitary(&g, &p).unwrap()).unwrap();
        let exact = table.conditional_moments().moments(0.5);
        assert_eq!(est.subspace_dim, 64);
        assert!((est.stats.mean - exact.mean).abs() < 1e-8);
        assert_eq!(est.stats.estimator_tag, EstimatorTag::ExtSqt);
    }
}
