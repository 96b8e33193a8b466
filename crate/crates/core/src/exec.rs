//! Execution strategy for the data-parallel loops.
//!
//! Every parallel loop in the crate goes through [`map_indexed`] or
//! [`find_first`]. Both return results in index order, so the output of a
//! computation does not depend on the strategy or the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How independent work items are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon thread pool. Falls back to sequential without the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..n).map(f)` collected in index order.
pub fn map_indexed<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Lowest index for which `f` returns `Some`.
pub fn find_first<T, F>(n: usize, exec: Execution, f: F) -> Option<(usize, T)>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().filter_map(|i| f(i).map(|t| (i, t))).find_first(|_| true);
    }
    let _ = exec;
    (0..n).find_map(|i| f(i).map(|t| (i, t)))
}

/// Independent ChaCha8 stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Caps the global rayon pool from `ESSKIT_THREADS` (0 or unset = automatic).
///
/// Returns the requested thread count, if any. Has no effect once the
/// global pool is already initialized.
pub fn configure_threads_from_env() -> Option<usize> {
    let threads = std::env::var("ESSKIT_THREADS").ok()?.trim().parse::<usize>().ok()?;
    if threads == 0 {
        return None;
    }
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Some(threads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn strategies_agree() {
        let f = |i: usize| (i as f64).sqrt();
        assert_eq!(
            map_indexed(1000, Execution::Sequential, f),
            map_indexed(1000, Execution::Parallel, f)
        );
        let g = |i: usize| if i % 97 == 13 { Some(i * 2) } else { None };
        assert_eq!(find_first(1000, Execution::Parallel, g), Some((13, 26)));
        assert_eq!(find_first(1000, Execution::Sequential, g), Some((13, 26)));
        assert_eq!(find_first(10, Execution::Parallel, |_| None::<()>), None);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream_rng(7, 3).random();
        let b: u64 = stream_rng(7, 3).random();
        let c: u64 = stream_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
