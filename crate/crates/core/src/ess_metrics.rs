//! Generalized effective sample size (G-ESS) functions, entropies and
//! concentration indices of a normalized weight vector.
//!
//! The Huggins-Roy family `(sum w^beta)^(1/(1-beta))` is evaluated in log
//! space over the strictly positive entries. The limits `beta = 0`, `1`
//! and `inf` are selected by exact comparison of the parameter only.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::{self, fmt_sig};
use crate::simplex::WeightVector;

/// Relative slack on the `w >= 1/N` threshold used by [`ess_plus`] and
/// [`ess_q`], so that a uniform vector produced by floating-point
/// normalization still counts every entry.
pub const THRESHOLD_REL_TOL: f64 = 1e-12;

/// Terms with `beta * (log w - log max w)` below this are dropped by
/// [`huggins_roy_curve`]; they contribute less than `N * 1e-26` relative.
const CURVE_LOG_CUTOFF: f64 = -60.0;

/// Steps of the multiplicative update in [`huggins_roy_curve`] between
/// exact recomputations.
const CURVE_REANCHOR: usize = 256;

/// An effective sample count together with its rate `value / N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssValue {
    pub value: f64,
    pub rate: f64,
}

impl EssValue {
    pub fn new(value: f64, n: usize) -> Self {
        EssValue { value, rate: value / n as f64 }
    }
}

/// Formula families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    HugginsRoy,
    Tsallis,
    LpDistance,
    Plus,
    Q,
    Gini,
    Golosov,
    Env,
}

/// A G-ESS formula together with its real parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EssMethod {
    /// `beta` in `[0, inf]`.
    HugginsRoy(f64),
    /// `alpha` in `(0, inf)`.
    Tsallis(f64),
    /// `p > 0`.
    LpDistance(f64),
    Plus,
    Q,
    Gini,
    Golosov,
    Env,
}

impl EssMethod {
    pub fn huggins_roy(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(EssMethod::HugginsRoy(beta))
    }

    pub fn tsallis(alpha: f64) -> Result<Self> {
        check_positive_finite("alpha", alpha)?;
        Ok(EssMethod::Tsallis(alpha))
    }

    pub fn lp_distance(p: f64) -> Result<Self> {
        check_positive_finite("p", p)?;
        Ok(EssMethod::LpDistance(p))
    }

    pub fn family(&self) -> Family {
        match self {
            EssMethod::HugginsRoy(_) => Family::HugginsRoy,
            EssMethod::Tsallis(_) => Family::Tsallis,
            EssMethod::LpDistance(_) => Family::LpDistance,
            EssMethod::Plus => Family::Plus,
            EssMethod::Q => Family::Q,
            EssMethod::Gini => Family::Gini,
            EssMethod::Golosov => Family::Golosov,
            EssMethod::Env => Family::Env,
        }
    }

    /// The family parameter, or 0 for parameterless families.
    pub fn parameter(&self) -> f64 {
        match *self {
            EssMethod::HugginsRoy(x) | EssMethod::Tsallis(x) | EssMethod::LpDistance(x) => x,
            _ => 0.0,
        }
    }

    pub fn evaluate(&self, w: &WeightVector) -> Result<EssValue> {
        match *self {
            EssMethod::HugginsRoy(beta) => ess_huggins_roy(w, beta),
            EssMethod::Tsallis(alpha) => ess_tsallis(w, alpha),
            EssMethod::LpDistance(p) => ess_lp_distance(w, p),
            EssMethod::Plus => Ok(ess_plus(w)),
            EssMethod::Q => Ok(ess_q(w)),
            EssMethod::Gini => Ok(ess_gini(w)),
            EssMethod::Golosov => Ok(ess_golosov(w)),
            EssMethod::Env => Ok(ess_env(w)),
        }
    }
}

impl fmt::Display for EssMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EssMethod::HugginsRoy(b) => write!(f, "hr:{}", fmt_sig(b)),
            EssMethod::Tsallis(a) => write!(f, "ts:{}", fmt_sig(a)),
            EssMethod::LpDistance(p) => write!(f, "lp:{}", fmt_sig(p)),
            EssMethod::Plus => f.write_str("plus"),
            EssMethod::Q => f.write_str("q"),
            EssMethod::Gini => f.write_str("gini"),
            EssMethod::Golosov => f.write_str("gol"),
            EssMethod::Env => f.write_str("env"),
        }
    }
}

impl FromStr for EssMethod {
    type Err = Error;

    /// Parses `hr:<beta|inf>`, `ts:<alpha>`, `lp:<p>`, `plus`, `q`, `gini`,
    /// `env`, `gol`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::InvalidInput(format!("unknown method specifier '{s}'"));
        match s {
            "plus" => return Ok(EssMethod::Plus),
            "q" => return Ok(EssMethod::Q),
            "gini" => return Ok(EssMethod::Gini),
            "env" => return Ok(EssMethod::Env),
            "gol" => return Ok(EssMethod::Golosov),
            _ => {}
        }
        let (name, arg) = s.split_once(':').ok_or_else(unknown)?;
        let value = numeric::parse_extended(arg).ok_or_else(unknown)?;
        match name {
            "hr" => EssMethod::huggins_roy(value),
            "ts" => EssMethod::tsallis(value),
            "lp" => EssMethod::lp_distance(value),
            _ => Err(unknown()),
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidParameter(format!("beta must be in [0, inf], got {beta}")));
    }
    Ok(())
}

fn check_positive_finite(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

/// `-sum w log w` with `0 log 0 = 0`.
pub fn shannon_entropy(w: &WeightVector) -> f64 {
    let terms: Vec<f64> = w.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).collect();
    numeric::sum(&terms)
}

/// `log sum w^beta` over the positive entries.
fn log_power_sum(w: &WeightVector, beta: f64) -> f64 {
    let logs: Vec<f64> = w.iter().filter(|&&x| x > 0.0).map(|&x| beta * x.ln()).collect();
    numeric::logsumexp(&logs)
}

/// Renyi entropy in nats, `beta > 0` (including `inf`).
pub fn renyi_entropy(w: &WeightVector, beta: f64) -> Result<f64> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    Ok(renyi_unchecked(w, beta))
}

fn renyi_unchecked(w: &WeightVector, beta: f64) -> f64 {
    if beta == 0.0 {
        ((w.n() - w.zero_count()) as f64).ln()
    } else if beta == 1.0 {
        shannon_entropy(w)
    } else if beta == f64::INFINITY {
        -w.max().ln()
    } else {
        log_power_sum(w, beta) / (1.0 - beta)
    }
}

/// Huggins-Roy family `(sum w^beta)^(1/(1-beta))`, `beta` in `[0, inf]`.
///
/// `beta = 0` counts the nonzero entries, `beta = 1` is the perplexity
/// `exp(H)` and `beta = inf` is `1 / max w`.
pub fn ess_huggins_roy(w: &WeightVector, beta: f64) -> Result<EssValue> {
    check_beta(beta)?;
    let value = if beta == 0.0 {
        (w.n() - w.zero_count()) as f64
    } else if beta == f64::INFINITY {
        1.0 / w.max()
    } else {
        renyi_unchecked(w, beta).exp()
    };
    Ok(EssValue::new(value, w.n()))
}

/// Perplexity `exp(-sum w log w)`.
pub fn perplexity(w: &WeightVector) -> EssValue {
    EssValue::new(shannon_entropy(w).exp(), w.n())
}

/// Huggins-Roy ESS for many `beta` at once from normalized log-weights.
///
/// `log_w[n] = log w_n` (`-inf` for zero entries). Terms whose scaled
/// log-ratio to the largest weight falls below -60 are skipped, which
/// makes large `beta` cheap; the relative error this introduces is far
/// below double precision.
///
/// Along an increasing run of `beta` with a constant step the powers are
/// advanced by one multiplication per term instead of an `exp`, and are
/// recomputed exactly every [`CURVE_REANCHOR`] steps.
pub fn huggins_roy_curve(log_w: &[f64], betas: &[f64]) -> Vec<f64> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut diffs: Vec<f64> = log_w
        .iter()
        .filter(|x| x.is_finite())
        .map(|&x| x - max)
        .collect();
    diffs.sort_by(|a, b| b.total_cmp(a));
    let nonzero = diffs.len() as f64;
    let shannon = -log_w
        .iter()
        .filter(|x| x.is_finite())
        .map(|&x| x.exp() * x)
        .sum::<f64>();
    let floor = CURVE_LOG_CUTOFF.exp();

    // p[i] = exp(b * diffs[i]) for i < active, where b tracks the last beta.
    let mut p = vec![0.0; diffs.len()];
    let mut factor = vec![0.0; diffs.len()];
    let mut active = 0;
    let mut last: Option<f64> = None;
    let mut tracked = f64::NAN;
    let mut step = f64::NAN;
    let mut since_anchor = 0;

    let mut out = Vec::with_capacity(betas.len());
    for &beta in betas {
        if beta == 0.0 {
            out.push(nonzero);
            continue;
        } else if beta == 1.0 {
            out.push(shannon.exp());
            continue;
        } else if beta == f64::INFINITY {
            out.push((-max).exp());
            continue;
        }
        let mut sum = None;
        if let Some(prev) = last {
            if beta > prev && since_anchor < CURVE_REANCHOR {
                let delta = beta - prev;
                if (delta - step).abs() > 1e-12 || step.is_nan() {
                    step = delta;
                    for i in 0..active {
                        factor[i] = (step * diffs[i]).exp();
                    }
                }
                if (tracked + step - beta).abs() <= 1e-12 {
                    sum = Some(scale_and_sum(&mut p[..active], &factor[..active]));
                    tracked += step;
                    since_anchor += 1;
                }
            }
        }
        let s = match sum {
            Some(s) => s,
            None => {
                active = diffs.iter().take_while(|&&d| beta * d >= CURVE_LOG_CUTOFF).count();
                for i in 0..active {
                    p[i] = (beta * diffs[i]).exp();
                }
                tracked = beta;
                step = f64::NAN;
                since_anchor = 0;
                lane_sum(&p[..active])
            }
        };
        while active > 0 && p[active - 1] < floor {
            active -= 1;
        }
        out.push(((beta * max + s.ln()) / (1.0 - beta)).exp());
        last = Some(beta);
    }
    out
}

const LANES: usize = 8;

/// Multiplies `p` by `factor` elementwise and returns the lane sum of the result.
fn scale_and_sum(p: &mut [f64], factor: &[f64]) -> f64 {
    let mut acc = [0.0; LANES];
    let split = p.len() - p.len() % LANES;
    let (head, tail) = p.split_at_mut(split);
    for (c, f) in head.chunks_exact_mut(LANES).zip(factor.chunks_exact(LANES)) {
        for j in 0..LANES {
            c[j] *= f[j];
            acc[j] += c[j];
        }
    }
    for (j, (x, f)) in tail.iter_mut().zip(&factor[split..]).enumerate() {
        *x *= f;
        acc[j] += *x;
    }
    acc.iter().sum()
}

/// Sum over eight interleaved accumulators, combined in a fixed order.
fn lane_sum(xs: &[f64]) -> f64 {
    let mut acc = [0.0; LANES];
    let chunks = xs.chunks_exact(LANES);
    let rest = chunks.remainder();
    for c in chunks {
        for j in 0..LANES {
            acc[j] += c[j];
        }
    }
    for (j, x) in rest.iter().enumerate() {
        acc[j] += x;
    }
    acc.iter().sum()
}

/// Tsallis entropy `(1 - sum w^alpha)/(alpha - 1)`; Shannon entropy at `alpha = 1`.
pub fn tsallis_entropy(w: &WeightVector, alpha: f64) -> Result<f64> {
    check_positive_finite("alpha", alpha)?;
    if alpha == 1.0 {
        return Ok(shannon_entropy(w));
    }
    Ok((1.0 - power_sum(w, alpha)) / (alpha - 1.0))
}

fn power_sum(w: &WeightVector, alpha: f64) -> f64 {
    let terms: Vec<f64> = w.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(alpha)).collect();
    numeric::sum(&terms)
}

/// Tsallis-based G-ESS: the entropy translated and scaled onto `[1, N]`.
///
/// The scaling constant is written so that the uniform vector maps to `N`:
/// `ESS = (N-1)(1 - sum w^alpha)/(1 - N^(1-alpha)) + 1`. At `alpha = 1`
/// the continuous limit `(N-1) H / log N + 1` is returned, and `N = 1`
/// returns 1.
pub fn ess_tsallis(w: &WeightVector, alpha: f64) -> Result<EssValue> {
    check_positive_finite("alpha", alpha)?;
    let n = w.n();
    if n == 1 {
        return Ok(EssValue::new(1.0, 1));
    }
    let nf = n as f64;
    let value = if alpha == 1.0 {
        (nf - 1.0) * shannon_entropy(w) / nf.ln() + 1.0
    } else {
        let denom = -((1.0 - alpha) * nf.ln()).exp_m1();
        (nf - 1.0) * (1.0 - power_sum(w, alpha)) / denom + 1.0
    };
    Ok(EssValue::new(value, n))
}

/// `1 - sum w^2`.
pub fn gini_impurity(w: &WeightVector) -> f64 {
    let squares: Vec<f64> = w.iter().map(|x| x * x).collect();
    1.0 - numeric::sum(&squares)
}

/// The q-exponential `(1 + (1-alpha) t)^(1/(1-alpha))`, `exp(t)` at `alpha = 1`.
pub fn q_exponential(t: f64, alpha: f64) -> Result<f64> {
    if alpha == 1.0 {
        return Ok(t.exp());
    }
    let base = 1.0 + (1.0 - alpha) * t;
    if base < 0.0 || base.is_nan() {
        return Err(Error::DomainError(format!(
            "1 + (1 - alpha) t = {base} is negative (t = {t}, alpha = {alpha})"
        )));
    }
    Ok(base.powf(1.0 / (1.0 - alpha)))
}

/// Normalizing constant of the `L_p` family, `(N-1)/(N-1 + (N-1)^p)^(1/p)`.
fn lp_alpha(n: usize, p: f64) -> f64 {
    let m = (n - 1) as f64;
    let log_m = m.ln();
    let a = log_m;
    let b = p * log_m;
    let hi = a.max(b);
    let log_inner = hi + ((a - hi).exp() + (b - hi).exp()).ln();
    m / (log_inner / p).exp()
}

/// `||w - u||_p` with `u` uniform, scaled by the largest deviation to
/// avoid overflow for large `p`.
fn lp_distance_to_uniform(w: &WeightVector, p: f64) -> f64 {
    let u = 1.0 / w.n() as f64;
    let devs: Vec<f64> = w.iter().map(|x| (x - u).abs()).collect();
    let scale = devs.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let terms: Vec<f64> = devs.iter().map(|d| (d / scale).powf(p)).collect();
    scale * numeric::sum(&terms).powf(1.0 / p)
}

/// Distance-based family `1/(alpha_p ||w - u||_p + 1/N)`. Proper but not
/// stable. `N = 1` returns 1.
pub fn ess_lp_distance(w: &WeightVector, p: f64) -> Result<EssValue> {
    check_positive_finite("p", p)?;
    let n = w.n();
    if n == 1 {
        return Ok(EssValue::new(1.0, 1));
    }
    let dist = lp_distance_to_uniform(w, p);
    let value = 1.0 / (lp_alpha(n, p) * dist + 1.0 / n as f64);
    Ok(EssValue::new(value, n))
}

fn at_least_uniform(x: f64, threshold: f64) -> bool {
    x >= threshold * (1.0 - THRESHOLD_REL_TOL)
}

/// Number of entries `>= 1/N`.
pub fn ess_plus(w: &WeightVector) -> EssValue {
    let threshold = 1.0 / w.n() as f64;
    let count = w.iter().filter(|&&x| at_least_uniform(x, threshold)).count();
    EssValue::new(count as f64, w.n())
}

/// `N+ + N * gamma`, with `gamma` the mass of entries strictly below `1/N`.
pub fn ess_q(w: &WeightVector) -> EssValue {
    let n = w.n();
    let threshold = 1.0 / n as f64;
    let mut plus = 0usize;
    let mut below = Vec::new();
    for &x in w.iter() {
        if at_least_uniform(x, threshold) {
            plus += 1;
        } else {
            below.push(x);
        }
    }
    let gamma = numeric::sum(&below);
    EssValue::new(plus as f64 + n as f64 * gamma, n)
}

fn sorted(w: &WeightVector) -> Vec<f64> {
    let mut v = w.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Gini-coefficient G-ESS, `-2 sum n w_(n) + 1 + 2N` over the ascending sort.
pub fn ess_gini(w: &WeightVector) -> EssValue {
    let n = w.n();
    let ranked: Vec<f64> = sorted(w)
        .iter()
        .enumerate()
        .map(|(i, x)| (i + 1) as f64 * x)
        .collect();
    let s = numeric::sum(&ranked);
    EssValue::new(-2.0 * s + 1.0 + 2.0 * n as f64, n)
}

/// `1 + 2 sum_{k=1}^{N-1} sum_{i<=k} w_(i)`.
pub fn ess_env(w: &WeightVector) -> EssValue {
    let n = w.n();
    let v = sorted(w);
    let mut partial = 0.0;
    let mut cumulative = Vec::with_capacity(n.saturating_sub(1));
    for &x in &v[..n - 1] {
        partial += x;
        cumulative.push(partial);
    }
    EssValue::new(1.0 + 2.0 * numeric::sum(&cumulative), n)
}

/// Golosov's effective number, `sum w/(w + max^2 - w^2)`.
pub fn ess_golosov(w: &WeightVector) -> EssValue {
    let max = w.max();
    let max_sq = max * max;
    let terms: Vec<f64> = w
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x / (x + max_sq - x * x))
        .collect();
    EssValue::new(numeric::sum(&terms), w.n())
}

/// `1 / ESS-H^(beta)`; the Herfindahl-Hirschman index at `beta = 2`.
pub fn concentration(w: &WeightVector, beta: f64) -> Result<f64> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    Ok(1.0 / ess_huggins_roy(w, beta)?.value)
}

/// `1/(1/N + N var(w))` with the population variance of the entries.
pub fn ess_variance_form(w: &WeightVector) -> EssValue {
    let n = w.n();
    let nf = n as f64;
    let mean = 1.0 / nf;
    let squares: Vec<f64> = w.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = numeric::sum(&squares) / nf;
    EssValue::new(1.0 / (mean + nf * var), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::{uniform, vertex};

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    fn flat_tops() -> Vec<WeightVector> {
        (1..=5)
            .map(|k| {
                let mut v = vec![0.0; 5];
                for x in v.iter_mut().take(k) {
                    *x = 1.0 / k as f64;
                }
                wv(&v)
            })
            .collect()
    }

    #[test]
    fn huggins_roy_examples() {
        let u5 = uniform(5).unwrap();
        assert!((ess_huggins_roy(&u5, 2.0).unwrap().value - 5.0).abs() < 1e-12);
        let b = wv(&[0.5, 0.5, 0.0, 0.0, 0.0]);
        assert!((ess_huggins_roy(&b, 2.0).unwrap().value - 2.0).abs() < 1e-12);
        let t = 1.0 / 3.0;
        let c = wv(&[t, t, t, 0.0, 0.0]);
        assert!((ess_huggins_roy(&c, f64::INFINITY).unwrap().value - 3.0).abs() < 1e-12);
        let v = vertex(5, 1).unwrap();
        for beta in [0.3, 1.0, 2.0, 7.5, 100.0, f64::INFINITY] {
            assert!((ess_huggins_roy(&v, beta).unwrap().value - 1.0).abs() < 1e-12);
        }
        // (0.3^4 + 0.1^4 + 0.4^4 + 0.2^4)^(-1/3) = 0.0354^(-1/3)
        let w = wv(&[0.3, 0.1, 0.4, 0.2]);
        let expected = 0.0354f64.powf(-1.0 / 3.0);
        assert!((expected - 3.045_548_9).abs() < 1e-6);
        assert!((ess_huggins_roy(&w, 4.0).unwrap().value - expected).abs() < 1e-12);
    }

    #[test]
    fn huggins_roy_limits_and_errors() {
        let w = wv(&[0.5, 0.25, 0.25, 0.0]);
        assert_eq!(ess_huggins_roy(&w, 0.0).unwrap().value, 3.0);
        let h: f64 = -(0.5 * 0.5f64.ln() + 0.5 * 0.25f64.ln());
        assert!((ess_huggins_roy(&w, 1.0).unwrap().value - h.exp()).abs() < 1e-12);
        assert_eq!(ess_huggins_roy(&w, f64::INFINITY).unwrap().value, 2.0);
        assert!(matches!(ess_huggins_roy(&w, -1.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(ess_huggins_roy(&w, f64::NAN), Err(Error::InvalidParameter(_))));
        let r = ess_huggins_roy(&w, 2.0).unwrap();
        assert!((r.rate - r.value / 4.0).abs() < 1e-15);
    }

    #[test]
    fn huggins_roy_large_beta_large_n() {
        let raw: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        let total: f64 = raw.iter().sum();
        let w = wv(&raw.iter().map(|x| x / total).collect::<Vec<_>>());
        let v = ess_huggins_roy(&w, 200.0).unwrap().value;
        assert!(v.is_finite() && v >= 1.0 / w.max() && v <= 1000.0);
    }

    #[test]
    fn renyi_examples() {
        let u = uniform(7).unwrap();
        for beta in [0.5, 1.0, 2.0, f64::INFINITY] {
            assert!((renyi_entropy(&u, beta).unwrap() - 7f64.ln()).abs() < 1e-12);
        }
        let v = vertex(4, 3).unwrap();
        for beta in [0.5, 1.0, 2.0, f64::INFINITY] {
            assert!(renyi_entropy(&v, beta).unwrap().abs() < 1e-15);
        }
        let h = wv(&[0.5, 0.5]);
        assert!((renyi_entropy(&h, 2.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(renyi_entropy(&h, 0.0).is_err());
    }

    #[test]
    fn tsallis_examples() {
        let v = vertex(4, 2).unwrap();
        assert_eq!(tsallis_entropy(&v, 3.0).unwrap(), 0.0);
        assert!((tsallis_entropy(&wv(&[0.5, 0.5]), 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((tsallis_entropy(&uniform(4).unwrap(), 2.0).unwrap() - 0.75).abs() < 1e-15);
        assert!(tsallis_entropy(&v, 0.0).is_err());
        let h = wv(&[0.5, 0.5]);
        assert!((tsallis_entropy(&h, 1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ess_tsallis_examples() {
        for alpha in [0.3, 1.0, 2.0, 5.0] {
            let u = uniform(6).unwrap();
            assert!((ess_tsallis(&u, alpha).unwrap().value - 6.0).abs() < 1e-10);
            let v = vertex(6, 2).unwrap();
            assert!((ess_tsallis(&v, alpha).unwrap().value - 1.0).abs() < 1e-12);
        }
        let b = wv(&[0.5, 0.5, 0.0, 0.0, 0.0]);
        assert!((ess_tsallis(&b, 2.0).unwrap().value - 3.5).abs() < 1e-12);
        assert_eq!(ess_tsallis(&uniform(1).unwrap(), 2.0).unwrap().value, 1.0);
        assert!(ess_tsallis(&b, -1.0).is_err());
    }

    #[test]
    fn gini_impurity_examples() {
        assert_eq!(gini_impurity(&vertex(3, 1).unwrap()), 0.0);
        assert!((gini_impurity(&uniform(5).unwrap()) - 0.8).abs() < 1e-15);
        assert!((gini_impurity(&wv(&[0.5, 0.5, 0.0])) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn q_exponential_examples() {
        assert_eq!(q_exponential(0.0, 3.0).unwrap(), 1.0);
        assert_eq!(q_exponential(0.7, 1.0).unwrap(), 0.7f64.exp());
        assert!((q_exponential(0.5, 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(q_exponential(2.0, 2.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn lp_distance_on_flat_tops() {
        let expected = [1.0, 1.45, 1.90, 2.5, 5.0];
        for (w, e) in flat_tops().iter().zip(expected) {
            let v = ess_lp_distance(w, 2.0).unwrap().value;
            assert!((v - e).abs() <= 0.005, "{v} vs {e}");
        }
        assert!(ess_lp_distance(&uniform(3).unwrap(), 0.0).is_err());
    }

    #[test]
    fn lp_distance_extremes_many_p() {
        for p in [0.5, 1.0, 2.0, 3.0, 50.0, 400.0] {
            for n in [2, 3, 10] {
                let u = ess_lp_distance(&uniform(n).unwrap(), p).unwrap().value;
                assert!((u - n as f64).abs() < 1e-9 * n as f64, "p={p} n={n} u={u}");
                let v = ess_lp_distance(&vertex(n, 1).unwrap(), p).unwrap().value;
                assert!((v - 1.0).abs() < 1e-9, "p={p} n={n} v={v}");
            }
        }
    }

    #[test]
    fn plus_and_q_examples() {
        let w = wv(&[0.8, 0.0, 0.2]);
        assert_eq!(ess_plus(&w).value, 1.0);
        assert!((ess_q(&w).value - 1.6).abs() < 1e-12);
        assert_eq!(ess_plus(&uniform(7).unwrap()).value, 7.0);
        assert_eq!(ess_plus(&wv(&[0.5, 0.3, 0.1, 0.1])).value, 2.0);
        assert_eq!(ess_q(&vertex(4, 4).unwrap()).value, 1.0);
        assert_eq!(ess_q(&uniform(9).unwrap()).value, 9.0);
    }

    #[test]
    fn plus_counts_renormalized_uniform() {
        let raw = crate::simplex::RawWeights::new(vec![0.7; 49]).unwrap();
        let w = crate::simplex::normalize(&raw).unwrap();
        assert_eq!(ess_plus(&w).value, 49.0);
    }

    #[test]
    fn gini_env_examples() {
        for n in [1, 2, 5, 10] {
            let u = uniform(n).unwrap();
            assert!((ess_gini(&u).value - n as f64).abs() < 1e-12);
            assert!((ess_env(&u).value - n as f64).abs() < 1e-12);
            let v = vertex(n, n).unwrap();
            assert!((ess_gini(&v).value - 1.0).abs() < 1e-12);
            assert!((ess_env(&v).value - 1.0).abs() < 1e-12);
        }
        let w = wv(&[0.5, 0.5, 0.0]);
        assert!((ess_gini(&w).value - 2.0).abs() < 1e-12);
        assert!((ess_env(&w).value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn golosov_examples() {
        assert!((ess_golosov(&uniform(6).unwrap()).value - 6.0).abs() < 1e-12);
        assert_eq!(ess_golosov(&vertex(6, 3).unwrap()).value, 1.0);
        assert!((ess_golosov(&wv(&[0.5, 0.5])).value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn concentration_examples() {
        assert!((concentration(&vertex(4, 1).unwrap(), 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((concentration(&uniform(4).unwrap(), 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((concentration(&wv(&[0.5, 0.5, 0.0]), 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(concentration(&uniform(4).unwrap(), 0.0).is_err());
    }

    #[test]
    fn variance_form_examples() {
        assert!((ess_variance_form(&uniform(8).unwrap()).value - 8.0).abs() < 1e-12);
        assert!((ess_variance_form(&vertex(8, 2).unwrap()).value - 1.0).abs() < 1e-12);
        let b = wv(&[0.5, 0.5, 0.0, 0.0, 0.0]);
        assert!((ess_variance_form(&b).value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn curve_matches_pointwise() {
        let w = wv(&[0.5, 0.3, 0.15, 0.05, 0.0]);
        let logs: Vec<f64> = w.iter().map(|x| x.ln()).collect();
        let betas = [0.0, 0.2, 0.5, 1.0, 2.0, 3.7, 50.0, 1e4, f64::INFINITY];
        let curve = huggins_roy_curve(&logs, &betas);
        for (b, c) in betas.iter().zip(curve) {
            let exact = ess_huggins_roy(&w, *b).unwrap().value;
            assert!((c - exact).abs() <= 1e-12 * exact, "beta={b}: {c} vs {exact}");
        }
        // Long constant-step runs go through the multiplicative update.
        let mut grid: Vec<f64> = (0..=996).map(|k| ((0.2 + k as f64 * 0.05) * 1e9).round() / 1e9).collect();
        grid.push(f64::INFINITY);
        let curve = huggins_roy_curve(&logs, &grid);
        for (b, c) in grid.iter().zip(curve) {
            let exact = ess_huggins_roy(&w, *b).unwrap().value;
            assert!((c - exact).abs() <= 1e-10 * exact, "beta={b}: {c} vs {exact}");
        }
    }

    #[test]
    fn method_specifiers_round_trip() {
        for s in ["hr:2", "hr:inf", "hr:0.5", "ts:2", "lp:1", "plus", "q", "gini", "env", "gol"] {
            let m: EssMethod = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert_eq!("hr:inf".parse::<EssMethod>().unwrap(), EssMethod::HugginsRoy(f64::INFINITY));
        for bad in ["xx", "hr", "hr:abc", "lp:0", "ts:-1", "hr:-2", "gini:2"] {
            assert!(bad.parse::<EssMethod>().is_err(), "{bad}");
        }
        assert_eq!(EssMethod::Gini.parameter(), 0.0);
        assert_eq!(EssMethod::LpDistance(2.0).family(), Family::LpDistance);
    }
}
