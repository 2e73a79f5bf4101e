//! Scoped-thread executor for batched objective evaluations.

use std::num::NonZeroUsize;
use std::thread;

use csmpose_core::search::Executor;

use crate::error::{CliError, CliResult};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "CSMPOSE_THREADS";

/// Splits each batch into contiguous chunks, one per worker. Results come
/// back in index order, so the outcome never depends on the worker count.
#[derive(Debug, Clone, Copy)]
pub struct Threads {
    workers: usize,
}

impl Threads {
    pub fn new(workers: usize) -> Self {
        Threads { workers: workers.max(1) }
    }

    /// Worker count from [`THREADS_ENV`], else the available parallelism.
    pub fn from_env() -> CliResult<Self> {
        match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(Self::new(n)),
                _ => Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
            },
            Err(_) => Ok(Self::new(thread::available_parallelism().map_or(1, NonZeroUsize::get))),
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }
}

impl Executor for Threads {
    fn map(&self, n: usize, f: &(dyn Fn(usize) -> f64 + Sync)) -> Vec<f64> {
        let workers = self.workers.min(n);
        if workers <= 1 {
            return (0..n).map(f).collect();
        }
        let chunk = n.div_ceil(workers);
        thread::scope(|s| {
            let handles: Vec<_> = (0..n)
                .step_by(chunk)
                .map(|start| s.spawn(move || (start..(start + chunk).min(n)).map(f).collect::<Vec<f64>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("evaluation worker panicked")).collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_keep_index_order() {
        let f = |i: usize| (i * i) as f64;
        let expected: Vec<f64> = (0..37).map(f).collect();
        for w in [1, 2, 3, 8, 64] {
            assert_eq!(Threads::new(w).map(37, &f), expected);
        }
        assert!(Threads::new(4).map(0, &f).is_empty());
    }

    #[test]
    fn zero_workers_means_one() {
        assert_eq!(Threads::new(0).workers(), 1);
    }
}
