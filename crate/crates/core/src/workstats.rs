//! Work samples, raw estimators, entropy production and the TUR bound.
//!
//! The bound is `Var[W] ≥ β⁻² h(Σ)` with `Σ = β E[W]`, `h(σ) = σ² f(σ)`,
//! `f(σ) = 1/sinh²(u)` and `u tanh u = σ/2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::sim::TpmSample;

/// Diagonal energy `E_x = Σ_q (-1)^{x_q+1}` of `H₀ = -ΣZ`.
pub fn energy_of(bits: &BitString) -> f64 {
    2.0 * bits.count_ones() as f64 - bits.len() as f64
}

/// `W = E_y - E_x`.
pub fn work_of(s: &TpmSample) -> f64 {
    debug_assert_eq!(s.x.len(), s.y.len());
    energy_of(&s.y) - energy_of(&s.x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorTag {
    Raw,
    Sqt,
    ExtSqt,
    Exact,
    Lrt,
    Wn,
}

impl EstimatorTag {
    pub const ALL: [EstimatorTag; 6] = [
        EstimatorTag::Raw,
        EstimatorTag::Sqt,
        EstimatorTag::ExtSqt,
        EstimatorTag::Exact,
        EstimatorTag::Lrt,
        EstimatorTag::Wn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorTag::Raw => "raw",
            EstimatorTag::Sqt => "sqt",
            EstimatorTag::ExtSqt => "ext_sqt",
            EstimatorTag::Exact => "exact",
            EstimatorTag::Lrt => "lrt",
            EstimatorTag::Wn => "wn",
        }
    }

    /// Whether the statistics carry finite-sample noise.
    pub fn is_sampled(self) -> bool {
        matches!(self, EstimatorTag::Raw | EstimatorTag::Sqt | EstimatorTag::ExtSqt)
    }
}

impl fmt::Display for EstimatorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for EstimatorTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown estimator '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkStatistics {
    pub mean: f64,
    pub variance: f64,
    pub n_samples: usize,
    pub estimator_tag: EstimatorTag,
}

impl WorkStatistics {
    pub fn new(mean: f64, variance: f64, n_samples: usize, estimator_tag: EstimatorTag) -> Self {
        WorkStatistics {
            mean,
            variance: variance.max(0.0),
            n_samples,
            estimator_tag,
        }
    }

    /// Standard error of the mean; zero for non-sampled statistics.
    pub fn mean_std_error(&self) -> f64 {
        if self.estimator_tag.is_sampled() && self.n_samples > 0 {
            (self.variance / self.n_samples as f64).sqrt()
        } else {
            0.0
        }
    }
}

/// Sample mean and `1/(N-1)` sample variance of the work.
pub fn raw_estimators(samples: &[TpmSample]) -> Result<WorkStatistics> {
    let work: Vec<f64> = samples.iter().map(work_of).collect();
    raw_from_work(&work)
}

pub fn raw_from_work(work: &[f64]) -> Result<WorkStatistics> {
    let n = work.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let mean = work.iter().sum::<f64>() / n as f64;
    let ss: f64 = work.iter().map(|w| (w - mean) * (w - mean)).sum();
    Ok(WorkStatistics::new(mean, ss / (n - 1) as f64, n, EstimatorTag::Raw))
}

/// `Σ = β E[W]`.
pub fn entropy_production(mean: f64, beta: f64) -> Result<f64> {
    if beta == 0.0 {
        return Err(Error::InvalidParameter(
            "entropy production undefined at infinite temperature; use TUR in variance form with bound -> 0"
                .into(),
        ));
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    Ok(beta * mean)
}

/// Solves `u tanh u = s` for `s > 0`.
fn inverse_x_tanh_x(s: f64) -> f64 {
    let phi = |y: f64| y * y.tanh() - s;
    let mut lo = s.sqrt().max(s) * (1.0 - 1e-12);
    let mut hi = s.sqrt().max(s) + 1.0;
    while phi(hi) < 0.0 {
        hi *= 2.0;
    }
    if phi(lo) > 0.0 {
        lo = 0.0;
    }
    // for small s, y tanh y ≈ y²
    let mut y = if s < 1.0 { s.sqrt() } else { s + 0.5 * (1.0 - (-2.0 * s).exp()) };
    y = y.clamp(lo, hi);
    for _ in 0..200 {
        let v = phi(y);
        if v == 0.0 {
            return y;
        }
        if v < 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let t = y.tanh();
        let d = t + y * (1.0 - t * t);
        let mut next = y - v / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - y).abs() <= 1e-16 * y || hi - lo <= 1e-16 * hi {
            return next;
        }
        y = next;
    }
    y
}

/// `f(σ) = 1/sinh²(u)` with `u tanh u = σ/2`.
pub fn tur_f(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("tur_f needs sigma > 0, got {sigma}")));
    }
    let u = inverse_x_tanh_x(sigma / 2.0);
    let sh = u.sinh();
    Ok(1.0 / (sh * sh))
}

/// `h(σ) = σ² f(σ)`, extended by `h(0) = 0`.
pub fn tur_h(sigma: f64) -> Result<f64> {
    if sigma == 0.0 {
        return Ok(0.0);
    }
    if sigma < 0.0 {
        return Err(Error::InvalidParameter(format!("tur_h needs sigma >= 0, got {sigma}")));
    }
    Ok(sigma * sigma * tur_f(sigma)?)
}

/// Tolerance applied when judging TUR satisfaction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TurTolerance {
    Absolute(f64),
    /// Multiple of the standard error of `variance - bound`.
    StandardErrors(f64),
}

impl TurTolerance {
    pub const EXACT: TurTolerance = TurTolerance::Absolute(1e-9);
    pub const SAMPLED: TurTolerance = TurTolerance::StandardErrors(2.0);

    pub fn for_tag(tag: EstimatorTag) -> Self {
        if tag.is_sampled() {
            Self::SAMPLED
        } else {
            Self::EXACT
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TurRecord {
    pub sigma: f64,
    pub bound: f64,
    pub variance: f64,
    pub satisfied: bool,
    pub slack: f64,
    /// Set when the mean work is not positive and the bound was taken as 0.
    #[serde(skip)]
    pub degenerate: bool,
}

/// TUR check with the default tolerance for the estimator type.
pub fn tur_check(stats: &WorkStatistics, beta: f64) -> Result<TurRecord> {
    tur_check_with(stats, beta, TurTolerance::for_tag(stats.estimator_tag))
}

pub fn tur_check_with(stats: &WorkStatistics, beta: f64, tol: TurTolerance) -> Result<TurRecord> {
    let sigma = entropy_production(stats.mean, beta)?;
    let degenerate = !(sigma > 0.0);
    let bound = if degenerate { 0.0 } else { tur_h(sigma)? / (beta * beta) };
    let slack = stats.variance - bound;
    let allowance = match tol {
        TurTolerance::Absolute(a) => a,
        TurTolerance::StandardErrors(k) => k * slack_std_error(stats, beta, sigma),
    };
    Ok(TurRecord {
        sigma,
        bound,
        variance: stats.variance,
        satisfied: stats.variance >= bound - allowance,
        slack,
        degenerate,
    })
}

fn slack_std_error(stats: &WorkStatistics, beta: f64, sigma: f64) -> f64 {
    let n = stats.n_samples;
    if n < 2 {
        return 0.0;
    }
    // Gaussian approximation for the spread of the sample variance
    let se_var = stats.variance * (2.0 / (n - 1) as f64).sqrt();
    let se_mean = (stats.variance / n as f64).sqrt();
    let dh = if sigma > 0.0 {
        let d = 1e-6 * sigma.max(1e-6);
        let hi = tur_h(sigma + d).unwrap_or(0.0);
        let lo = tur_h((sigma - d).max(0.0)).unwrap_or(0.0);
        (hi - lo) / (sigma + d - (sigma - d).max(0.0))
    } else {
        2.0
    };
    let se_bound = dh / beta * se_mean;
    (se_var * se_var + se_bound * se_bound).sqrt()
}
