//! Closed forms: linear-response cumulants, the Kubo relaxation function, the
//! TUR slope, and work moments under extreme depolarizing noise.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::sim::{sample_initial, TpmSample};

/// Inputs of the linear-response cumulants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrtParams {
    pub beta: f64,
    pub gamma: f64,
    pub tau: f64,
    pub n_edges: usize,
}

impl LrtParams {
    pub fn new(beta: f64, gamma: f64, tau: f64, n_edges: usize) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
        }
        if n_edges == 0 {
            return Err(Error::InvalidParameter("n_edges must be at least 1".into()));
        }
        Ok(LrtParams {
            beta,
            gamma,
            tau,
            n_edges,
        })
    }
}

const SERIES_RADIUS: f64 = 1e-4;

/// Envelope `g(x) = 2π² x² (1 + cos x) / (π² - x²)²`.
pub fn g_env(x: f64) -> f64 {
    // with ε = |x| - π: 1 + cos x = 2 sin²(ε/2) and π² - x² = -ε(2π + ε)
    let eps = x.abs() - PI;
    let c = if eps.abs() < SERIES_RADIUS {
        0.5 - eps * eps / 24.0
    } else {
        let s = (eps / 2.0).sin() / eps;
        2.0 * s * s
    };
    let d = 2.0 * PI + eps;
    2.0 * PI * PI * x * x * c / (d * d)
}

/// `y coth(y/2)`, finite at `y = 0`.
fn x_coth_half(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        2.0 + y2 / 6.0 - y2 * y2 / 360.0
    } else {
        y / (y / 2.0).tanh()
    }
}

/// Frequency weight `γ_k(ω)` at inverse temperature `β`.
pub fn gamma_k(omega: f64, beta: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("cumulant order must be >= 1".into()));
    }
    let y = beta * omega;
    Ok(if k.is_multiple_of(2) {
        0.5 * y.powi(k as i32 - 2) * x_coth_half(y)
    } else {
        0.5 * y.powi(k as i32 - 1)
    })
}

/// Two-point function `⟨X̃(s) X(t)⟩` of a single spin in the Gibbs state.
pub fn kubo_correlator(s: f64, t: f64, beta: f64) -> Complex64 {
    let up = Complex64::from_polar((beta - 2.0 * s).exp(), 2.0 * t);
    let down = Complex64::from_polar((-beta + 2.0 * s).exp(), -2.0 * t);
    (up + down) / (2.0 * beta.cosh())
}

/// Kubo relaxation function `Ψ₀(t) = (β/2|E|)[tanh β cos 4t + β sech² β]`.
pub fn kubo_relaxation(t: f64, beta: f64, n_edges: usize) -> f64 {
    let sech = 1.0 / beta.cosh();
    beta / (2.0 * n_edges as f64) * (beta.tanh() * (4.0 * t).cos() + beta * sech * sech)
}

/// Cumulant `κ_k` of the work distribution to second order in `γ`.
pub fn lrt_cumulant(k: u32, p: &LrtParams) -> Result<f64> {
    let b = p.beta;
    let weight = 0.5 * b.powi(1 - k as i32) * b.tanh() * gamma_k(4.0, b, k)?;
    Ok(p.gamma * p.gamma / p.n_edges as f64 * weight * g_env(4.0 * p.tau))
}

/// Slope `2β coth 2β` of `κ₂` against the small-`Σ` TUR bound.
pub fn lrt_slope(beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    Ok(0.5 * x_coth_half(4.0 * beta))
}

/// Mean and variance of the work when `y` is uniformly random.
pub fn wn_moments(n_spin: usize, beta: f64) -> Result<(f64, f64)> {
    if n_spin == 0 || !(beta >= 0.0) {
        return Err(Error::InvalidParameter("need n_spin >= 1 and beta >= 0".into()));
    }
    let n = n_spin as f64;
    let t = beta.tanh();
    Ok((n * t, n * (2.0 - t * t)))
}

/// Samples with Gibbs `x` and independent uniform `y`.
pub fn wn_sampler(n_spin: usize, beta: f64, shots: usize, rng: &mut Rng) -> Vec<TpmSample> {
    (0..shots)
        .map(|_| {
            let x = sample_initial(beta, n_spin, rng);
            let mut y = BitString::zeros(n_spin);
            for q in 0..n_spin {
                y.set(q, rng.random::<bool>());
            }
            TpmSample { x, y }
        })
        .collect()
}
