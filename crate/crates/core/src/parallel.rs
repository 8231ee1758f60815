//! Internal helper for optional data parallelism.
//!
//! Per-slice fits and Monte-Carlo style loops are pure and independent,
//! so they may run on a rayon pool. The sequential fallback produces
//! bit-identical results because outputs are collected in index order.

#[cfg(feature = "parallel")]
pub(crate) fn map_indices<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices<T, F>(n: usize, _parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}
