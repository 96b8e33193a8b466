//! Normalized weight vectors on the unit simplex.
//!
//! Every metric in this crate consumes a [`WeightVector`]. Construction
//! validates nonnegativity and the unit sum; afterwards the value is
//! immutable.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::numeric;

/// Absolute tolerance on `|sum - 1|` accepted at construction.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Unnormalized importance ratios `w_n >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawWeights(Vec<f64>);

impl RawWeights {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidSize("raw weights must be non-empty".into()));
        }
        for (index, &value) in entries.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        if entries.iter().all(|&x| x == 0.0) {
            return Err(Error::AllZeroWeights);
        }
        Ok(RawWeights(entries))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A point on the unit simplex: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Validates already-normalized entries.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidSize("weight vector must be non-empty".into()));
        }
        for (index, &value) in entries.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        let sum = numeric::sum(&entries);
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        Ok(WeightVector(entries))
    }

    /// Number of entries `N`.
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Count of entries that are exactly zero.
    pub fn zero_count(&self) -> usize {
        self.0.iter().filter(|&&x| x == 0.0).count()
    }

    /// Applies a permutation: `out[i] = self[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::InvalidSize(format!(
                "permutation of length {} for vector of length {}",
                perm.len(),
                self.n()
            )));
        }
        let mut seen = vec![false; perm.len()];
        let mut out = Vec::with_capacity(perm.len());
        for &p in perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
            seen[p] = true;
            out.push(self.0[p]);
        }
        Ok(WeightVector(out))
    }
}

impl Deref for WeightVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        WeightVector::new(v)
    }
}

/// Divides every raw weight by their total.
pub fn normalize(raw: &RawWeights) -> Result<WeightVector> {
    let total = numeric::sum(raw.as_slice());
    if total == 0.0 {
        return Err(Error::AllZeroWeights);
    }
    if !total.is_finite() {
        // Rescale by the max first so the total stays finite.
        let max = raw.as_slice().iter().copied().fold(0.0, f64::max);
        let scaled: Vec<f64> = raw.as_slice().iter().map(|x| x / max).collect();
        return normalize(&RawWeights(scaled));
    }
    let entries: Vec<f64> = raw.as_slice().iter().map(|x| x / total).collect();
    WeightVector::new(entries)
}

/// The uniform vector `[1/n, ..., 1/n]`.
pub fn uniform(n: usize) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::InvalidSize("n must be at least 1".into()));
    }
    Ok(WeightVector(vec![1.0 / n as f64; n]))
}

/// Simplex vertex with a single 1 at the 1-based index `j`.
pub fn vertex(n: usize, j: usize) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::InvalidSize("n must be at least 1".into()));
    }
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    let mut v = vec![0.0; n];
    v[j - 1] = 1.0;
    Ok(WeightVector(v))
}

/// Concatenates `m` copies of `w` and scales by `1/m`.
pub fn replicate(w: &WeightVector, m: usize) -> Result<WeightVector> {
    if m == 0 {
        return Err(Error::InvalidSize("replication factor must be at least 1".into()));
    }
    if m == 1 {
        return Ok(w.clone());
    }
    let scale = 1.0 / m as f64;
    let mut out = Vec::with_capacity(w.n() * m);
    for _ in 0..m {
        out.extend(w.iter().map(|x| x * scale));
    }
    WeightVector::new(out)
}

/// Stable ascending sort of the entries.
pub fn sort_ascending(w: &WeightVector) -> WeightVector {
    let mut v = w.0.clone();
    v.sort_by(f64::total_cmp);
    WeightVector(v)
}
