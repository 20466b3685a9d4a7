//! Per-thread operation counters.
//!
//! Counters are thread-local; [`measure`] runs a closure on a dedicated
//! single-thread pool so that nested parallel work is attributed to it.

use std::cell::Cell;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub g1_mul: u64,
    pub fixed_mul: u64,
    pub msm_terms: u64,
    pub pairings: u64,
    pub gt_exp: u64,
    pub fft_points: u64,
    pub range_bits: u64,
}

impl OpCounts {
    /// Group operations of all kinds, each counted once.
    pub fn group_ops(&self) -> u64 {
        self.g1_mul + self.fixed_mul + self.msm_terms + self.pairings + self.gt_exp
    }
}

thread_local! {
    static COUNTS: Cell<OpCounts> = Cell::new(OpCounts::default());
}

pub(crate) fn record(f: impl FnOnce(&mut OpCounts)) {
    COUNTS.with(|c| {
        let mut v = c.get();
        f(&mut v);
        c.set(v);
    });
}

pub fn reset() {
    COUNTS.with(|c| c.set(OpCounts::default()));
}

pub fn snapshot() -> OpCounts {
    COUNTS.with(|c| c.get())
}

/// Runs `f` on a fresh one-thread pool and returns its result with the operations it performed.
pub fn measure<R: Send>(f: impl FnOnce() -> R + Send) -> (R, OpCounts) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("thread pool");
    pool.install(|| {
        reset();
        let r = f();
        (r, snapshot())
    })
}
