//! Global multiply-add counter for complexity measurements.
//!
//! The banded solvers and the local-polynomial baseline report how many
//! multiply-add operations they perform. Counts are accumulated locally
//! inside each routine and flushed once into a process-wide atomic, so
//! the total is exact and deterministic, independent of thread
//! scheduling.

use std::sync::atomic::{AtomicU64, Ordering};

static OPS: AtomicU64 = AtomicU64::new(0);

/// Reset the counter to zero.
pub fn reset() {
    OPS.store(0, Ordering::Relaxed);
}

/// Total multiply-adds recorded since the last [`reset`].
pub fn total() -> u64 {
    OPS.load(Ordering::Relaxed)
}

/// Add a routine's local tally to the global counter.
pub(crate) fn add(n: u64) {
    OPS.fetch_add(n, Ordering::Relaxed);
}
