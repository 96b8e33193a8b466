use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::Result;
use crate::exec::{map_indexed, stream_rng, Execution};
use crate::simplex::WeightVector;

/// Simulated expected number of trials until a drawn pair collides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Closed form `1 / sum w^2`.
    pub expected: f64,
    pub experiments: usize,
}

impl CollisionEstimate {
    /// `|mean - expected|` in units of the standard error.
    pub fn z_score(&self) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == self.expected {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - self.expected).abs() / self.std_error
        }
    }
}

fn trials_until_collision<R: Rng + ?Sized>(dist: &WeightedIndex<f64>, rng: &mut R) -> u64 {
    let mut t = 1;
    loop {
        let x = dist.sample(rng);
        let z = dist.sample(rng);
        if x == z {
            return t;
        }
        t += 1;
    }
}

/// Runs `r` experiments, each drawing index pairs i.i.d. from `w` until
/// both indices agree, and averages the number of pairs drawn.
pub fn pair_collision_mean_trials(w: &WeightVector, r: usize, seed: u64, exec: Execution) -> Result<CollisionEstimate> {
    if r == 0 {
        return Err(crate::error::Error::InvalidParameter("need at least one experiment".into()));
    }
    let dist = WeightedIndex::new(w.iter().copied())
        .map_err(|e| crate::error::Error::InvalidInput(e.to_string()))?;
    let counts = map_indexed(r, exec, |i| {
        let mut rng = stream_rng(seed, i as u64);
        trials_until_collision(&dist, &mut rng) as f64
    });
    let rf = r as f64;
    let mean = counts.iter().sum::<f64>() / rf;
    let var = if r > 1 {
        counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (rf - 1.0)
    } else {
        0.0
    };
    let sum_sq: f64 = w.iter().map(|x| x * x).sum();
    Ok(CollisionEstimate { mean, std_error: (var / rf).sqrt(), expected: 1.0 / sum_sq, experiments: r })
}
