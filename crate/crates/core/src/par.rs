//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper takes a `parallel` flag so callers (and benches) can pick the
//! execution mode at runtime. Without the `parallel` feature the flag is
//! ignored and everything runs on the calling thread. Results are always
//! returned in index order so output never depends on scheduling.

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `range`, collecting results in index order.
pub fn map_range<T, F>(parallel: bool, range: Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return range.into_par_iter().map(f).collect();
    }
    let _ = parallel;
    range.map(f).collect()
}

/// Returns true if `f` holds for some index in `range`.
pub fn any_in_range<F>(parallel: bool, range: Range<usize>, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return range.into_par_iter().any(f);
    }
    let _ = parallel;
    range.into_iter().any(f)
}

/// Splits `0..total` into roughly equal chunks, suitable for `map_range`.
pub fn chunks(total: u64, pieces: u64) -> Vec<(u64, u64)> {
    let pieces = pieces.max(1).min(total.max(1));
    let step = total.div_ceil(pieces);
    let mut out = Vec::new();
    let mut lo = 0;
    while lo < total {
        let hi = (lo + step).min(total);
        out.push((lo, hi));
        lo = hi;
    }
    out
}

/// Whether parallel execution is compiled in.
pub const fn available() -> bool {
    cfg!(feature = "parallel")
}
