//! Effective number of components from a monotone model-selection error
//! curve `V(0), ..., V(N)`.
//!
//! A non-increasing curve is turned into weights by its normalized drops
//! `d_k = V(k-1) - V(k)`, and any G-ESS of those weights is an effective
//! number of components. The ENV index `1 + (2/V(0)) sum_{k=1}^{N-1} V(k)`
//! is computed directly from the curve.

use crate::error::{Error, Result};
use crate::ess_metrics::EssMethod;
use crate::numeric;
use crate::simplex::{normalize, sort_ascending, RawWeights, WeightVector};

/// Steps against the declared direction up to this size are flattened.
pub const MONOTONE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    NonIncreasing,
    NonDecreasing,
}

/// A monotone error curve with `N + 1` points.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    values: Vec<f64>,
    direction: Direction,
}

impl ErrorCurve {
    /// Validates length, finiteness and monotonicity. Jitter up to
    /// [`MONOTONE_TOL`] against the direction is flattened.
    pub fn new(values: Vec<f64>, direction: Direction) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSize("an error curve needs at least 2 points".into()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite curve value at k={index}")));
        }
        let mut values = values;
        for k in 1..values.len() {
            let step = match direction {
                Direction::NonIncreasing => values[k - 1] - values[k],
                Direction::NonDecreasing => values[k] - values[k - 1],
            };
            if step < -MONOTONE_TOL {
                return Err(Error::NotMonotone { k, step });
            }
            if step < 0.0 {
                values[k] = values[k - 1];
            }
        }
        Ok(ErrorCurve { values, direction })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Number of components `N` (one less than the number of points).
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// Shift that moves the anchor point (`V(N)` for non-increasing,
    /// `V(0)` for non-decreasing curves) to zero.
    pub fn anchor_shift(&self) -> f64 {
        match self.direction {
            Direction::NonIncreasing => self.values[self.n()],
            Direction::NonDecreasing => self.values[0],
        }
    }
}

/// Normalized drops `d_k / sum d` of a non-increasing curve.
pub fn weights_from_error_curve(curve: &ErrorCurve) -> Result<WeightVector> {
    if curve.direction != Direction::NonIncreasing {
        return Err(Error::InvalidInput("weights need a non-increasing curve".into()));
    }
    let drops: Vec<f64> = curve.values.windows(2).map(|p| (p[0] - p[1]).max(0.0)).collect();
    if drops.iter().all(|&d| d == 0.0) {
        return Err(Error::FlatCurve);
    }
    normalize(&RawWeights::new(drops)?)
}

/// ENV index of the curve after translating its anchor point to zero.
pub fn env_index(curve: &ErrorCurve) -> Result<f64> {
    let shift = curve.anchor_shift();
    let shifted: Vec<f64> = curve.values.iter().map(|v| v - shift).collect();
    let n = curve.n();
    let normalizer = match curve.direction {
        Direction::NonIncreasing => shifted[0],
        Direction::NonDecreasing => shifted[n],
    };
    if normalizer == 0.0 {
        return Err(Error::FlatCurve);
    }
    let interior = numeric::sum(&shifted[1..n]);
    Ok(1.0 + 2.0 * interior / normalizer)
}

/// The non-decreasing cumulative curve `V(k) = sum_{i<=k} w_(i)` of the
/// ascending-sorted weights, with `V(0) = 0`.
pub fn cumulative_curve(w: &WeightVector) -> ErrorCurve {
    let sorted = sort_ascending(w);
    let mut values = Vec::with_capacity(w.n() + 1);
    let mut acc = 0.0;
    values.push(0.0);
    for &x in sorted.iter() {
        acc += x;
        values.push(acc);
    }
    ErrorCurve { values, direction: Direction::NonDecreasing }
}

/// ENV index of the cumulative curve of `w`; coincides with the Gini ESS.
pub fn ess_env_via_curve(w: &WeightVector) -> f64 {
    env_index(&cumulative_curve(w)).expect("cumulative curve of a weight vector ends at 1")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveComponents {
    pub raw: f64,
    /// Nearest integer, halves rounded away from zero.
    pub rounded: i64,
    pub method: EssMethod,
    /// Translation applied so that the curve ends at zero.
    pub shift: f64,
}

/// Evaluates `method` on the normalized drops of a non-increasing curve.
pub fn effective_components(curve: &ErrorCurve, method: EssMethod) -> Result<EffectiveComponents> {
    let w = weights_from_error_curve(curve)?;
    let raw = method.evaluate(&w)?.value;
    Ok(EffectiveComponents { raw, rounded: raw.round() as i64, method, shift: curve.anchor_shift() })
}
