//! Execution helper that fans independent work items out to rayon when the
//! `parallel` feature is enabled and runs them sequentially otherwise.
//!
//! Results are collected into a `Vec` ordered by item index, so callers can
//! reduce them sequentially and obtain bit-identical output regardless of
//! thread count or feature selection.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every index in `0..count` and returns the results in index
/// order.
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}
