//! Data-parallel map helpers with a sequential fallback.
//!
//! Built with the `parallel` feature (default), the helpers dispatch to
//! rayon; without it they run plain loops. `force_sequential` switches a
//! thread to the plain loops at runtime, which the benchmarks use to compare
//! both code paths in one build. All parallel loops in this crate map
//! independent work items and write disjoint outputs, so results are
//! identical (bitwise) either way.

use std::cell::Cell;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

thread_local! {
    static FORCE_SEQ: Cell<bool> = const { Cell::new(false) };
}

/// Run `f` with parallel dispatch disabled on this thread.
pub fn force_sequential<R>(f: impl FnOnce() -> R) -> R {
    FORCE_SEQ.with(|c| {
        let prev = c.replace(true);
        let out = f();
        c.set(prev);
        out
    })
}

pub(crate) fn parallel_enabled() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQ.with(Cell::get)
}

/// Map a range to a vector, in parallel when enabled.
pub(crate) fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Map a slice to a vector, in parallel when enabled.
pub(crate) fn map_slice<'a, S, T, F>(items: &'a [S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&'a S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}
