//! Unit-step accounting used to check worst-case operation budgets.

use std::sync::atomic::{AtomicU64, Ordering};

/// Monotone counter of unit steps (cell probes, cell writes, queue edits,
/// hash evaluations). Atomic so that `&self` lookups can be metered while the
/// owning structure stays `Sync`.
#[derive(Debug, Default)]
pub struct Meter(AtomicU64);

impl Meter {
    #[inline]
    pub fn tick(&self, n: u64) {
        self.0.fetch_add(n, Ordering::Relaxed);
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

impl Clone for Meter {
    fn clone(&self) -> Self {
        Meter(AtomicU64::new(self.total()))
    }
}
