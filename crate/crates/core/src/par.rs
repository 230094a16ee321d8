//! Execution strategy for the term-pair loops behind every product.
//!
//! With the `parallel` feature (default) the outer loop of a product is split
//! across the rayon pool; without it every strategy runs sequentially. Exact
//! coefficients make the merged result independent of the split.

/// How to run a product's term-pair loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Requires the `parallel` feature; falls back to sequential without it.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Below this many term pairs the pool overhead dominates.
const PARALLEL_MIN_PAIRS: usize = 256;

/// Folds `items` into per-worker accumulators and merges them.
pub(crate) fn fold_merge<T, A, I, F, M>(items: &[T], pairs: usize, exec: Exec, init: I, fold: F, merge: M) -> A
where
    T: Sync,
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, &T) + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if exec == Exec::Parallel && pairs >= PARALLEL_MIN_PAIRS && items.len() > 1 && rayon::current_num_threads() > 1 {
            use rayon::prelude::*;
            // one chunk per worker keeps per-worker caches warm and merges few
            let chunk = items.len().div_ceil(rayon::current_num_threads()).max(1);
            return items
                .par_chunks(chunk)
                .map(|part| {
                    let mut acc = init();
                    for t in part {
                        fold(&mut acc, t);
                    }
                    acc
                })
                .reduce_with(&merge)
                .unwrap_or_else(&init);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = (pairs, exec, &merge, PARALLEL_MIN_PAIRS);
    let mut acc = init();
    for t in items {
        fold(&mut acc, t);
    }
    acc
}

/// Maps `items` in parallel when allowed, preserving order.
pub fn map_collect<T, R, F>(items: &[T], exec: Exec, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if exec == Exec::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(&f).collect();
        }
    }
    let _ = exec;
    items.iter().map(f).collect()
}
