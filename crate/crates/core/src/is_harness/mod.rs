//! Monte Carlo harness for self-normalized importance sampling with a
//! standard Gaussian target and a Gaussian proposal.
//!
//! The theoretical ESS is the variance ratio `N var_pi[I_hat] / var_q[I_tilde]`
//! for the integrand `h(x) = x`. The harness estimates it by replication,
//! compares it against the Huggins-Roy family over a grid of `beta`, and
//! fits the best `beta` and the best combination of `ESS-H^(2)` and
//! `ESS-H^(inf)`.
//!
//! Proposal draws are `mu + sigma * z` with `z` from the ziggurat
//! `StandardNormal` sampler of `rand_distr`, fed by a ChaCha8 stream
//! selected by `(seed, grid index, replication index)`.

mod collision;
mod fit;
mod sampling;
mod sweep;

pub use collision::{pair_collision_mean_trials, CollisionEstimate};
pub use fit::{fit_linear_combo, optimal_beta, ComboFit};
pub use sampling::{estimate_theoretical_ess, run_is_replication, Replication, TheoreticalEss};
pub use sweep::{sweep, sweep_with};

use crate::error::{Error, Result};

/// Target `N(0, 1)` and proposal `N(proposal_mean, proposal_sd^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPair {
    pub proposal_mean: f64,
    pub proposal_sd: f64,
}

impl GaussianPair {
    pub const TARGET_MEAN: f64 = 0.0;
    pub const TARGET_SD: f64 = 1.0;

    pub fn new(proposal_mean: f64, proposal_sd: f64) -> Result<Self> {
        if !(proposal_sd > 0.0 && proposal_sd.is_finite()) || !proposal_mean.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "proposal N({proposal_mean}, {proposal_sd}^2) is not a valid Gaussian"
            )));
        }
        Ok(GaussianPair { proposal_mean, proposal_sd })
    }

    /// `log pi(x) - log q(x)`.
    pub fn log_ratio(&self, x: f64) -> f64 {
        let z = (x - self.proposal_mean) / self.proposal_sd;
        -0.5 * x * x + 0.5 * z * z + self.proposal_sd.ln()
    }
}

/// Which proposal parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vary {
    /// `mu_p` over the grid with `sigma_p = 1`.
    Mean,
    /// `sigma_p` over the grid with `mu_p = 0`.
    Sigma,
}

impl Vary {
    pub fn pair(self, param: f64) -> Result<GaussianPair> {
        match self {
            Vary::Mean => GaussianPair::new(param, 1.0),
            Vary::Sigma => GaussianPair::new(0.0, param),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Vary::Mean => "mean",
            Vary::Sigma => "sigma",
        }
    }
}

/// Centering of the empirical variance of `I_tilde`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VarianceCenter {
    /// Unbiased sample variance around the mean of the replications.
    #[default]
    EmpiricalMean,
    /// Mean squared error around the true value `E_pi[x] = 0`.
    TrueValue,
}

/// Integrand of the estimated expectation. Only `h(x) = x` is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrand {
    #[default]
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub grid: Vec<f64>,
    pub n_samples: usize,
    pub replications: usize,
    pub seed: u64,
    pub beta_grid: Vec<f64>,
    pub integrand: Integrand,
    pub center: VarianceCenter,
}

pub const DEFAULT_N_SAMPLES: usize = 1000;
pub const DEFAULT_REPLICATIONS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 1;

impl SweepConfig {
    /// Desk-scale defaults for a sweep over `vary`: `N = 1000`,
    /// `R = 10^4`, parameter grids `mu_p = 0:0.1:2` or
    /// `sigma_p = 0.5:0.025:1`, and `beta = 0.2:0.01:50` plus infinity.
    pub fn default_for(vary: Vary) -> Self {
        let grid = match vary {
            Vary::Mean => arithmetic_grid(0.0, 2.0, 0.1),
            Vary::Sigma => arithmetic_grid(0.5, 1.0, 0.025),
        };
        SweepConfig {
            grid,
            n_samples: DEFAULT_N_SAMPLES,
            replications: DEFAULT_REPLICATIONS,
            seed: DEFAULT_SEED,
            beta_grid: default_beta_grid(0.01),
            integrand: Integrand::Identity,
            center: VarianceCenter::EmpiricalMean,
        }
    }

    pub fn validate(&self, vary: Vary) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::InvalidParameter("n_samples must be at least 2".into()));
        }
        if self.replications < 2 {
            return Err(Error::InvalidParameter("replications must be at least 2".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidParameter("parameter grid is empty".into()));
        }
        if self.beta_grid.is_empty() || self.beta_grid.iter().any(|b| b.is_nan() || *b < 0.0) {
            return Err(Error::InvalidParameter("beta grid must be non-empty and nonnegative".into()));
        }
        for &p in &self.grid {
            vary.pair(p)?;
        }
        Ok(())
    }
}

/// `start, start + step, ..., end` with values rounded to 1e-9 so that
/// decimal grid points such as 2.0 are exact.
pub fn arithmetic_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0, "grid step must be positive");
    let count = ((end - start) / step + 1e-6).floor() as usize;
    (0..=count)
        .map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

/// `beta = 0.2:step:50` followed by infinity.
pub fn default_beta_grid(step: f64) -> Vec<f64> {
    let mut g = arithmetic_grid(0.2, 50.0, step);
    g.push(f64::INFINITY);
    g
}

/// Averaged rate curves over a parameter grid, the input to the fits.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub params: Vec<f64>,
    pub betas: Vec<f64>,
    /// `ESS_teo / N` per grid point.
    pub ess_teo_rate: Vec<f64>,
    /// `ess_h_rate[g][b]`: mean of `ESS-H^(beta_b) / N` at grid point `g`.
    pub ess_h_rate: Vec<Vec<f64>>,
}

impl RateTable {
    pub fn beta_index(&self, beta: f64) -> Option<usize> {
        self.betas.iter().position(|&b| {
            if beta.is_infinite() {
                b == beta
            } else {
                (b - beta).abs() < 1e-9
            }
        })
    }

    /// The `ESS-H^(beta)` rate curve across the grid.
    pub fn column(&self, b: usize) -> Vec<f64> {
        self.ess_h_rate.iter().map(|row| row[b]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub vary: Vary,
    pub n_samples: usize,
    pub replications: usize,
    pub seed: u64,
    pub rates: RateTable,
    /// Delta-method standard error of each `ess_teo_rate`.
    pub ess_teo_se: Vec<f64>,
    /// Empirical variance of the self-normalized estimator per grid point.
    pub var_is: Vec<f64>,
    /// Variance of the ideal Monte Carlo estimator, `1/N`.
    pub var_mc: Vec<f64>,
}
