//! Data-parallel execution helpers.
//!
//! Both helpers preserve item order and keep float arithmetic identical
//! between the `parallel` build and the sequential fallback: callers map
//! independent work items (or fixed-size chunks) and merge the collected
//! results in order. Thread scheduling can therefore never change a result.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, preserving index order in the output.
#[cfg(feature = "parallel")]
pub(crate) fn indexed_map<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn indexed_map<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Maps `f` over fixed-size chunks of `items`, preserving chunk order.
///
/// The chunk size is part of the algorithm, not a tuning knob picked per
/// run: identical chunking is what makes per-chunk float reductions merge
/// to bit-identical totals regardless of thread count.
#[cfg(feature = "parallel")]
pub(crate) fn chunked_map<T, U, F>(items: &[T], chunk: usize, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&[T]) -> U + Sync + Send,
{
    items.par_chunks(chunk).map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn chunked_map<T, U, F>(items: &[T], chunk: usize, f: F) -> Vec<U>
where
    F: Fn(&[T]) -> U,
{
    items.chunks(chunk).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexed_map_preserves_order() {
        let out = indexed_map(100, |i| i * i);
        assert_eq!(out[7], 49);
        assert_eq!(out.len(), 100);
    }

    #[test]
    fn chunked_map_chunks_in_order() {
        let items: Vec<u32> = (0..10).collect();
        let sums = chunked_map(&items, 4, |c| c.iter().sum::<u32>());
        assert_eq!(sums, vec![6, 22, 17]);
    }
}
