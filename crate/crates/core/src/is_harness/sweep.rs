use super::sampling::{run_is_replication, TheoreticalEss};
use super::{RateTable, SweepConfig, SweepResult, Vary};
use crate::error::Result;
use crate::ess_metrics::huggins_roy_curve;
use crate::exec::{map_indexed, stream_rng, Execution};

/// Replications per work item. Partial sums are formed per chunk and then
/// added in chunk order, so the result is independent of scheduling.
const CHUNK: usize = 250;

/// RNG stream of replication `rep` at grid point `g`.
pub(crate) fn replication_stream(g: usize, rep: usize) -> u64 {
    ((g as u64) << 32) | rep as u64
}

struct ChunkOutput {
    estimates: Vec<f64>,
    rate_sums: Vec<f64>,
}

/// Runs the sweep on the default execution strategy.
pub fn sweep(config: &SweepConfig, vary: Vary) -> Result<SweepResult> {
    sweep_with(config, vary, Execution::default())
}

/// For each grid point, replicates the importance sampler, estimates the
/// theoretical ESS rate and averages `ESS-H^(beta) / N` over the
/// replications for every `beta` in the config.
pub fn sweep_with(config: &SweepConfig, vary: Vary, exec: Execution) -> Result<SweepResult> {
    config.validate(vary)?;
    let n = config.n_samples;
    let r = config.replications;
    let chunks = r.div_ceil(CHUNK);
    let pairs = config
        .grid
        .iter()
        .map(|&p| vary.pair(p))
        .collect::<Result<Vec<_>>>()?;
    let nf = n as f64;

    let outputs = map_indexed(config.grid.len() * chunks, exec, |item| -> Result<ChunkOutput> {
        let g = item / chunks;
        let c = item % chunks;
        let reps = (c * CHUNK)..((c + 1) * CHUNK).min(r);
        let mut estimates = Vec::with_capacity(reps.len());
        let mut rate_sums = vec![0.0; config.beta_grid.len()];
        for rep in reps {
            let mut rng = stream_rng(config.seed, replication_stream(g, rep));
            let run = run_is_replication(&pairs[g], n, &mut rng)?;
            estimates.push(run.estimate);
            let curve = huggins_roy_curve(&run.log_weights, &config.beta_grid);
            for (acc, ess) in rate_sums.iter_mut().zip(curve) {
                *acc += ess / nf;
            }
        }
        Ok(ChunkOutput { estimates, rate_sums })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut ess_teo_rate = Vec::with_capacity(config.grid.len());
    let mut ess_teo_se = Vec::with_capacity(config.grid.len());
    let mut var_is = Vec::with_capacity(config.grid.len());
    let mut ess_h_rate = Vec::with_capacity(config.grid.len());
    for per_grid in outputs.chunks(chunks) {
        let estimates: Vec<f64> = per_grid.iter().flat_map(|o| o.estimates.iter().copied()).collect();
        let teo = TheoreticalEss::from_estimates(&estimates, n, config.center)?;
        let mut sums = vec![0.0; config.beta_grid.len()];
        for o in per_grid {
            for (s, x) in sums.iter_mut().zip(&o.rate_sums) {
                *s += x;
            }
        }
        ess_h_rate.push(sums.into_iter().map(|s| s / r as f64).collect());
        ess_teo_rate.push(teo.rate);
        ess_teo_se.push(teo.rate_se);
        var_is.push(teo.var_is);
    }

    Ok(SweepResult {
        vary,
        n_samples: n,
        replications: r,
        seed: config.seed,
        rates: RateTable {
            params: config.grid.clone(),
            betas: config.beta_grid.clone(),
            ess_teo_rate,
            ess_h_rate,
        },
        ess_teo_se,
        var_is,
        var_mc: vec![1.0 / nf; config.grid.len()],
    })
}
