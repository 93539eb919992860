//! Batch execution: index-driven maps that run data-parallel when the
//! `parallel` feature is on and sequentially otherwise. Callers that need a
//! side-by-side comparison (benches) can force the mode at runtime.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, preserving index order in the output.
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Like `indexed_map` but with an explicit mode switch; `parallel = true`
/// still degrades to sequential when the feature is compiled out.
pub fn indexed_map_mode<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if parallel {
        indexed_map(n, f)
    } else {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_index_order() {
        let out = indexed_map(100, |i| i * i);
        assert_eq!(out, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn modes_agree() {
        let par = indexed_map_mode(37, true, |i| 3 * i + 1);
        let seq = indexed_map_mode(37, false, |i| 3 * i + 1);
        assert_eq!(par, seq);
    }
}
