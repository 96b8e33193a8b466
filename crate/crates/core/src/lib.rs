//! Generalized effective sample size (G-ESS) functions and diversity
//! indices, an axiom checker for the five G-ESS conditions, a Gaussian
//! importance-sampling harness and an effective-number-of-components tool.
//!
//! ```
//! use esskit::{simplex::WeightVector, ess_metrics::EssMethod};
//!
//! let w = WeightVector::new(vec![0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]).unwrap();
//! let ess = EssMethod::HugginsRoy(2.0).evaluate(&w).unwrap();
//! assert!((ess.value - 3.0).abs() < 1e-12);
//! ```

// `!(x <= tol)` is used on purpose so that NaN counts as a violation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod ess_metrics;
pub mod exec;
pub mod io;
pub mod is_harness;
pub mod model_select;
pub mod numeric;
pub mod properties;
pub mod simplex;

pub use error::{Error, Result};
pub use ess_metrics::{EssMethod, EssValue, Family};
pub use exec::Execution;
pub use simplex::{RawWeights, WeightVector};
