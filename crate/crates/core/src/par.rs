//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`Exec::Parallel`] runs on
//! the rayon global pool; without it every call runs sequentially no matter
//! which variant is requested.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Splits `0..len` into `chunk`-sized ranges, maps each, and folds the
/// results with `combine`. `combine` must be associative.
pub fn map_reduce_chunks<T, M, C>(
    exec: Exec,
    len: usize,
    chunk: usize,
    identity: T,
    map: M,
    combine: C,
) -> T
where
    T: Send + Sync + Clone,
    M: Fn(Range<usize>) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let n_chunks = len.div_ceil(chunk);
    let range = move |i: usize| i * chunk..((i + 1) * chunk).min(len);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n_chunks)
            .into_par_iter()
            .map(|i| map(range(i)))
            .reduce(|| identity.clone(), &combine);
    }
    let _ = exec;
    (0..n_chunks).map(|i| map(range(i))).fold(identity, combine)
}

/// `(0..n).map(f).collect()`, in input order.
pub fn map_collect<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let s = map_reduce_chunks(
                exec,
                10_001,
                64,
                0u64,
                |r| r.map(|i| i as u64).sum(),
                |a, b| a + b,
            );
            assert_eq!(s, 10_000 * 10_001 / 2);
            assert_eq!(map_collect(exec, 5, |i| i * i), vec![0, 1, 4, 9, 16]);
            assert_eq!(map_reduce_chunks(exec, 0, 8, 7u64, |_| 1, |a, b| a + b), 7);
        }
    }
}
