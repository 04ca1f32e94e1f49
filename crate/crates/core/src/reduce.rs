//! Deterministic parallel evaluation: per-point work runs on the rayon pool,
//! results are combined in index order by pairwise summation, so sums are
//! bit-identical for any worker count.

use rayon::prelude::*;

use crate::error::Result;

const LEAF: usize = 8;

/// Pairwise (cascade) summation over a fixed binary split of the input.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Evaluates `f` at `0..n` in parallel and returns the results in index
/// order; the reported error is the one with the smallest index.
pub fn par_map<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = (0..n).into_par_iter().map(f).collect();
    results.into_iter().collect()
}

/// `Σ_k f(k)` evaluated in parallel with deterministic reduction.
pub fn par_sum<F>(n: usize, f: F) -> Result<f64>
where
    F: Fn(usize) -> Result<f64> + Sync + Send,
{
    Ok(pairwise_sum(&par_map(n, f)?))
}
