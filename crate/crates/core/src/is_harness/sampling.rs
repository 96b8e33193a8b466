use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{GaussianPair, VarianceCenter};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, stream_rng, Execution};
use crate::numeric;
use crate::simplex::{normalize, RawWeights, WeightVector};

/// One importance sampling run.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub weights: WeightVector,
    /// `log w_n` of the normalized weights, `-inf` for exact zeros.
    pub log_weights: Vec<f64>,
    /// Self-normalized estimate `sum w_n x_n`.
    pub estimate: f64,
}

/// Draws `n` proposal samples and returns the normalized weights and the
/// self-normalized estimate of `E_pi[x]`.
///
/// Weights are `exp(log pi - log q - max)` before normalization, so the
/// largest raw weight is exactly 1.
pub fn run_is_replication<R: Rng + ?Sized>(pair: &GaussianPair, n: usize, rng: &mut R) -> Result<Replication> {
    if n < 2 {
        return Err(Error::InvalidSize("n must be at least 2".into()));
    }
    let xs: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            pair.proposal_mean + pair.proposal_sd * z
        })
        .collect();
    let logs: Vec<f64> = xs.iter().map(|&x| pair.log_ratio(x)).collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::AllZeroWeights);
    }
    let raw = RawWeights::new(logs.iter().map(|l| (l - max).exp()).collect())?;
    let weights = normalize(&raw)?;
    let lse = numeric::logsumexp(&logs);
    let log_weights = logs
        .iter()
        .zip(weights.iter())
        .map(|(l, w)| if *w == 0.0 { f64::NEG_INFINITY } else { l - lse })
        .collect();
    let products: Vec<f64> = weights.iter().zip(&xs).map(|(w, x)| w * x).collect();
    let estimate = numeric::sum(&products);
    Ok(Replication { weights, log_weights, estimate })
}

/// Monte Carlo estimate of the theoretical ESS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoreticalEss {
    /// `N var_pi[I_hat] / var_q[I_tilde]` with `var_pi[I_hat] = 1/N`.
    pub value: f64,
    /// `value / N`.
    pub rate: f64,
    /// Empirical variance of `I_tilde` across replications.
    pub var_is: f64,
    /// Delta-method standard error of `rate`.
    pub rate_se: f64,
}

impl TheoreticalEss {
    /// Builds the estimate from the replicated estimator values.
    pub fn from_estimates(estimates: &[f64], n: usize, center: VarianceCenter) -> Result<Self> {
        let r = estimates.len();
        if r < 2 {
            return Err(Error::InvalidParameter("need at least 2 replications".into()));
        }
        let rf = r as f64;
        let mean = match center {
            VarianceCenter::EmpiricalMean => numeric::compensated_sum(estimates.iter().copied()) / rf,
            VarianceCenter::TrueValue => 0.0,
        };
        let sq: Vec<f64> = estimates.iter().map(|x| (x - mean) * (x - mean)).collect();
        let ss = numeric::compensated_sum(sq.iter().copied());
        let var = match center {
            VarianceCenter::EmpiricalMean => ss / (rf - 1.0),
            VarianceCenter::TrueValue => ss / rf,
        };
        if !(var > 0.0) {
            return Err(Error::DegenerateVariance);
        }
        let m4 = numeric::compensated_sum(sq.iter().map(|s| s * s)) / rf;
        let m2 = ss / rf;
        let var_of_var = ((m4 - m2 * m2 * (rf - 3.0) / (rf - 1.0)) / rf).max(0.0);
        let nf = n as f64;
        let value = 1.0 / var;
        let rate = value / nf;
        Ok(TheoreticalEss { value, rate, var_is: var, rate_se: rate * var_of_var.sqrt() / var })
    }
}

/// Replicates the estimator `r` times on streams `0..r` of `seed`.
pub fn estimate_theoretical_ess(
    pair: &GaussianPair,
    n: usize,
    r: usize,
    seed: u64,
    center: VarianceCenter,
    exec: Execution,
) -> Result<TheoreticalEss> {
    if r < 2 {
        return Err(Error::InvalidParameter("need at least 2 replications".into()));
    }
    let estimates = map_indexed(r, exec, |i| {
        let mut rng = stream_rng(seed, i as u64);
        run_is_replication(pair, n, &mut rng).map(|rep| rep.estimate)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    TheoreticalEss::from_estimates(&estimates, n, center)
}
