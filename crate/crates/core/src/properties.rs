//! Empirical checks of the five G-ESS conditions and the resulting class.
//!
//! * C1 symmetry: invariant under permutations of the weights.
//! * C2 maximum: equals `N` at the uniform vector.
//! * C3 minimum: equals 1 at every vertex.
//! * C4 unicity: the extremes are reached only there.
//! * C5 stability: `f_N(w) = f_{MN}(replicate(w, M)) / M`.
//!
//! C1, C4 and C5 are checked by sampling, so a pass only means that no
//! counterexample was found. Every trial draws from its own ChaCha stream
//! derived from `(seed, trial)`, which keeps reports identical whether the
//! trials run sequentially or on the thread pool.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::ess_metrics::EssMethod;
use crate::exec::{find_first, stream_rng, Execution};
use crate::numeric::fmt_sig;
use crate::simplex::{replicate, uniform, vertex, WeightVector};

pub const SYMMETRY_TOL: f64 = 1e-9;
pub const EXTREME_TOL: f64 = 1e-9;
pub const UNICITY_TOL: f64 = 1e-6;
pub const STABILITY_TOL: f64 = 1e-8;
/// Probability that a random trial forces a random subset of entries to zero.
pub const ZERO_PROBE_PROBABILITY: f64 = 0.3;
pub const DEFAULT_REPLICATIONS: [usize; 3] = [2, 3, 5];

const SYMMETRY_STREAM: u64 = 0;
const UNICITY_STREAM: u64 = 1 << 40;
const STABILITY_STREAM: u64 = 2 << 40;

/// Anything that maps a weight vector to an effective count.
pub trait EssFunction: Sync {
    fn eval(&self, w: &WeightVector) -> f64;
    fn label(&self) -> String;
}

impl EssFunction for EssMethod {
    fn eval(&self, w: &WeightVector) -> f64 {
        self.evaluate(w).map(|v| v.value).unwrap_or(f64::NAN)
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

/// Wraps a closure as an [`EssFunction`], e.g. for planted violations.
pub struct FnEss<F> {
    pub name: String,
    pub f: F,
}

impl<F: Fn(&WeightVector) -> f64 + Sync> EssFunction for FnEss<F> {
    fn eval(&self, w: &WeightVector) -> f64 {
        (self.f)(w)
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

/// Which extreme a unicity violation reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Detail {
    Permutation { permutation: Vec<usize>, original: f64, permuted: f64 },
    Extreme { expected: f64, got: f64 },
    Unicity { side: Side, value: f64 },
    Stability { m: usize, lhs: f64, rhs: f64 },
}

/// A reproducible witness of a failed condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub weights: Vec<f64>,
    pub detail: Detail,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CheckResult {
    Pass,
    Fail(Counterexample),
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        matches!(self, CheckResult::Pass)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            CheckResult::Pass => None,
            CheckResult::Fail(c) => Some(c),
        }
    }

    fn from_option(c: Option<Counterexample>) -> Self {
        c.map_or(CheckResult::Pass, CheckResult::Fail)
    }
}

/// C2 and C3 together.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremes {
    pub maximum: CheckResult,
    pub minimum: CheckResult,
}

impl Extremes {
    pub fn passed(&self) -> bool {
        self.maximum.passed() && self.minimum.passed()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GEssClass {
    Degenerate,
    Proper,
    DegenerateStable,
    ProperStable,
}

impl GEssClass {
    pub fn from_conditions(unicity: bool, stability: bool) -> Self {
        match (unicity, stability) {
            (true, true) => GEssClass::ProperStable,
            (true, false) => GEssClass::Proper,
            (false, true) => GEssClass::DegenerateStable,
            (false, false) => GEssClass::Degenerate,
        }
    }
}

impl fmt::Display for GEssClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GEssClass::Degenerate => "Degenerate",
            GEssClass::Proper => "Proper",
            GEssClass::DegenerateStable => "DegenerateStable",
            GEssClass::ProperStable => "ProperStable",
        })
    }
}

/// Outcome of [`classify`]: a class, or not a G-ESS at all when C1, C2 or C3 fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NotAGEss,
    Class(GEssClass),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NotAGEss => f.write_str("NotAGEss"),
            Verdict::Class(c) => c.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub method: String,
    pub n: usize,
    pub c1_symmetry: CheckResult,
    pub c2_maximum: CheckResult,
    pub c3_minimum: CheckResult,
    pub c4_unicity: CheckResult,
    pub c5_stability: CheckResult,
    pub trials_used: usize,
    pub seed: u64,
    pub verdict: Verdict,
}

impl AxiomReport {
    /// `(name, result)` for C1..C5 in order.
    pub fn conditions(&self) -> [(&'static str, &CheckResult); 5] {
        [
            ("C1 symmetry", &self.c1_symmetry),
            ("C2 maximum", &self.c2_maximum),
            ("C3 minimum", &self.c3_minimum),
            ("C4 unicity", &self.c4_unicity),
            ("C5 stability", &self.c5_stability),
        ]
    }

    fn pass_note(&self, name: &str) -> String {
        match name {
            "C2 maximum" | "C3 minimum" => "exact check".to_string(),
            _ => format!("no counterexample found in {} trials", self.trials_used),
        }
    }

    /// One CSV row per condition: `method,n,condition,result,detail`.
    pub fn csv_rows(&self) -> Vec<String> {
        self.conditions()
            .iter()
            .map(|(name, r)| {
                let (result, detail) = match r {
                    CheckResult::Pass => ("pass", self.pass_note(name)),
                    CheckResult::Fail(c) => ("fail", describe(c)),
                };
                format!("{},{},{},{},\"{}\"", self.method, self.n, name, result, detail)
            })
            .collect()
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| fmt_sig(*x)).collect();
    format!("[{}]", parts.join(" "))
}

fn describe(c: &Counterexample) -> String {
    let w = fmt_vec(&c.weights);
    match &c.detail {
        Detail::Permutation { permutation, original, permuted } => format!(
            "w={w} perm={permutation:?} f(w)={} f(perm w)={}",
            fmt_sig(*original),
            fmt_sig(*permuted)
        ),
        Detail::Extreme { expected, got } => {
            format!("w={w} expected={} got={}", fmt_sig(*expected), fmt_sig(*got))
        }
        Detail::Unicity { side, value } => {
            let side = match side {
                Side::Maximum => "maximum",
                Side::Minimum => "minimum",
            };
            format!("w={w} reaches the {side} (value={})", fmt_sig(*value))
        }
        Detail::Stability { m, lhs, rhs } => format!(
            "w={w} M={m} f_N(w)={} f_MN(rep)/M={}",
            fmt_sig(*lhs),
            fmt_sig(*rhs)
        ),
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "method: {}  n: {}  trials: {}  seed: {}", self.method, self.n, self.trials_used, self.seed)?;
        for (name, r) in self.conditions() {
            match r {
                CheckResult::Pass => writeln!(f, "  {name:<13} pass  ({})", self.pass_note(name))?,
                CheckResult::Fail(c) => writeln!(f, "  {name:<13} FAIL  {}", describe(c))?,
            }
        }
        write!(f, "class: {}", self.verdict)
    }
}

/// Uniform draw on the simplex from normalized `Exp(1)` variables.
pub fn random_simplex_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> WeightVector {
    let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    WeightVector::new(draws.iter().map(|x| x / total).collect()).expect("normalized draws")
}

/// Like [`random_simplex_point`] but, with probability
/// [`ZERO_PROBE_PROBABILITY`], zeroes a random nonempty proper subset of
/// the entries first.
pub fn random_probe_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> WeightVector {
    let mut draws: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    if n >= 2 && rng.random_bool(ZERO_PROBE_PROBABILITY) {
        let zeros = rng.random_range(1..n);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        for &i in &idx[..zeros] {
            draws[i] = 0.0;
        }
    }
    let total: f64 = draws.iter().sum();
    WeightVector::new(draws.iter().map(|x| x / total).collect()).expect("normalized draws")
}

fn exceeds(diff: f64, tol: f64) -> bool {
    // NaN counts as a violation.
    !(diff <= tol)
}

/// C1: `f(w) = f(sigma(w))` for random points and permutations.
pub fn check_symmetry(f: &dyn EssFunction, n: usize, trials: usize, seed: u64, exec: Execution) -> CheckResult {
    let tol = SYMMETRY_TOL * n as f64;
    let found = find_first(trials, exec, |t| {
        let mut rng = stream_rng(seed, SYMMETRY_STREAM + t as u64);
        let w = random_probe_point(&mut rng, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let pw = w.permuted(&perm).expect("valid permutation");
        let original = f.eval(&w);
        let permuted = f.eval(&pw);
        exceeds((original - permuted).abs(), tol).then(|| Counterexample {
            weights: w.into_entries(),
            detail: Detail::Permutation { permutation: perm, original, permuted },
        })
    });
    CheckResult::from_option(found.map(|(_, c)| c))
}

/// C2 at the uniform vector and C3 at every vertex.
pub fn check_extremes(f: &dyn EssFunction, n: usize) -> Extremes {
    let tol = EXTREME_TOL * n as f64;
    let u = uniform(n).expect("n >= 1");
    let got = f.eval(&u);
    let maximum = if exceeds((got - n as f64).abs(), tol) {
        CheckResult::Fail(Counterexample {
            weights: u.into_entries(),
            detail: Detail::Extreme { expected: n as f64, got },
        })
    } else {
        CheckResult::Pass
    };
    let minimum = (1..=n)
        .find_map(|j| {
            let v = vertex(n, j).expect("valid vertex");
            let got = f.eval(&v);
            exceeds((got - 1.0).abs(), tol).then(|| Counterexample {
                weights: v.into_entries(),
                detail: Detail::Extreme { expected: 1.0, got },
            })
        })
        .map_or(CheckResult::Pass, CheckResult::Fail);
    Extremes { maximum, minimum }
}

/// L-infinity distance to the nearest extreme point (uniform or a vertex).
fn distance_to_extremes(w: &WeightVector) -> f64 {
    let u = 1.0 / w.n() as f64;
    let to_uniform = w.iter().map(|x| (x - u).abs()).fold(0.0, f64::max);
    // Distance to vertex j is max(1 - w_j, max_{i != j} w_i); the nearest
    // vertex is the one at the largest entry.
    let (jmax, &wmax) = w
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let others = w
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != jmax)
        .map(|(_, x)| *x)
        .fold(0.0, f64::max);
    to_uniform.min((1.0 - wmax).max(others))
}

/// Deterministic near-extreme probes for C4.
///
/// The first family puts a dominant mass `a` on the first entry and the
/// rest on the third (or last) entry, e.g. `[0.8, 0, 0.2]` at `n = 3`.
pub fn unicity_probes(n: usize) -> Vec<WeightVector> {
    let mut probes = Vec::new();
    let mut push = |v: Vec<f64>| {
        let total: f64 = v.iter().sum();
        if let Ok(w) = WeightVector::new(v.iter().map(|x| x / total).collect()) {
            if distance_to_extremes(&w) > UNICITY_TOL {
                probes.push(w);
            }
        }
    };
    if n < 2 {
        return probes;
    }
    let second = if n >= 3 { 2 } else { 1 };
    for (a, b) in [(0.8, 0.2), (0.9, 0.1), (0.99, 0.01), (0.6, 0.4), (0.5, 0.5)] {
        let mut v = vec![0.0; n];
        v[0] = a;
        v[second] += b;
        push(v);
    }
    for a in [0.8, 0.99] {
        let mut v = vec![(1.0 - a) / (n - 1) as f64; n];
        v[0] = a;
        push(v);
    }
    for k in 2..n {
        let mut v = vec![0.0; n];
        for x in v.iter_mut().take(k) {
            *x = 1.0;
        }
        push(v);
    }
    for eps in [0.05, 0.2] {
        push((0..n).map(|i| if i % 2 == 0 { 1.0 + eps } else { 1.0 - eps }).collect());
    }
    push((0..n).map(|i| 0.5f64.powi(i as i32)).collect());
    probes
}

fn unicity_violation(f: &dyn EssFunction, w: WeightVector) -> Option<Counterexample> {
    let nf = w.n() as f64;
    let value = f.eval(&w);
    let side = if !(value < nf - UNICITY_TOL) {
        Some(Side::Maximum)
    } else if !(value > 1.0 + UNICITY_TOL) {
        Some(Side::Minimum)
    } else {
        None
    };
    side.map(|side| Counterexample { weights: w.into_entries(), detail: Detail::Unicity { side, value } })
}

/// C4: no non-extreme point reaches `N` or 1.
///
/// Structured probes are evaluated first, then `trials` random points that
/// are farther than `1e-6` (L-infinity) from every extreme point.
pub fn check_unicity(f: &dyn EssFunction, n: usize, trials: usize, seed: u64, exec: Execution) -> CheckResult {
    if let Some(c) = unicity_probes(n).into_iter().find_map(|w| unicity_violation(f, w)) {
        return CheckResult::Fail(c);
    }
    let found = find_first(trials, exec, |t| {
        let mut rng = stream_rng(seed, UNICITY_STREAM + t as u64);
        let w = loop {
            let w = random_probe_point(&mut rng, n);
            if distance_to_extremes(&w) > UNICITY_TOL {
                break w;
            }
        };
        unicity_violation(f, w)
    });
    CheckResult::from_option(found.map(|(_, c)| c))
}

/// C5: `f_N(w) = f_{MN}(replicate(w, M)) / M` for each `M` in `m_values`.
pub fn check_stability(
    f: &dyn EssFunction,
    n: usize,
    m_values: &[usize],
    trials: usize,
    seed: u64,
    exec: Execution,
) -> CheckResult {
    let tol = STABILITY_TOL * n as f64;
    let found = find_first(trials, exec, |t| {
        let mut rng = stream_rng(seed, STABILITY_STREAM + t as u64);
        let w = random_probe_point(&mut rng, n);
        stability_violation(f, &w, m_values, tol)
    });
    CheckResult::from_option(found.map(|(_, c)| c))
}

/// Stability check of a single vector, used by spot checks.
pub fn stability_violation(f: &dyn EssFunction, w: &WeightVector, m_values: &[usize], tol: f64) -> Option<Counterexample> {
    let lhs = f.eval(w);
    m_values.iter().find_map(|&m| {
        let rep = replicate(w, m).expect("m >= 1");
        let rhs = f.eval(&rep) / m as f64;
        exceeds((lhs - rhs).abs(), tol).then(|| Counterexample {
            weights: w.to_vec(),
            detail: Detail::Stability { m, lhs, rhs },
        })
    })
}

/// Runs all checks and maps the verdict pattern to a class.
pub fn classify(f: &dyn EssFunction, n: usize, trials: usize, seed: u64, exec: Execution) -> (Verdict, AxiomReport) {
    let c1 = check_symmetry(f, n, trials, seed, exec);
    let extremes = check_extremes(f, n);
    let c4 = check_unicity(f, n, trials, seed, exec);
    let c5 = check_stability(f, n, &DEFAULT_REPLICATIONS, trials, seed, exec);
    let verdict = if c1.passed() && extremes.passed() {
        Verdict::Class(GEssClass::from_conditions(c4.passed(), c5.passed()))
    } else {
        Verdict::NotAGEss
    };
    let report = AxiomReport {
        method: f.label(),
        n,
        c1_symmetry: c1,
        c2_maximum: extremes.maximum,
        c3_minimum: extremes.minimum,
        c4_unicity: c4,
        c5_stability: c5,
        trials_used: trials,
        seed,
        verdict,
    };
    (verdict, report)
}
