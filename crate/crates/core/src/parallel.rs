//! Worker-budget helpers.
//!
//! With the `parallel` feature a budget above one runs work on a rayon pool
//! (reusing the current pool when already inside one). Without it, or with a
//! budget of one, everything runs on the calling thread. Results are always
//! returned in index order.

use alloc::vec::Vec;

/// Runs `f` with a pool of `workers` threads installed.
#[cfg(feature = "parallel")]
pub fn with_pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers <= 1 || rayon::current_thread_index().is_some() {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_pool<R: Send>(_workers: usize, f: impl FnOnce() -> R + Send) -> R {
    f()
}

/// `(0..n).map(f)` spread over the worker budget.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(workers: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    with_pool(workers, || (0..n).into_par_iter().map(&f).collect())
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(_workers: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Contiguous chunk boundaries splitting `n` items into at most `parts` pieces.
pub fn chunk_bounds(n: usize, parts: usize) -> Vec<(usize, usize)> {
    let parts = parts.clamp(1, n.max(1));
    let base = n / parts;
    let extra = n % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for p in 0..parts {
        let len = base + usize::from(p < extra);
        out.push((start, start + len));
        start += len;
    }
    out
}
