//! Execution-mode plumbing: every bulk operation in this crate can run either
//! sequentially or data-parallel over rayon. Both modes must produce identical
//! results; parallel helpers therefore preserve input order and leave all
//! floating-point reduction to a sequential pass over the collected items.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How bulk work (measurement sweeps, verification sampling) is executed.
///
/// `Parallel` uses rayon when the `parallel` feature is enabled and silently
/// degrades to sequential execution otherwise, so callers never need to branch
/// on the feature themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Map `f` over `items`, returning results in input order.
pub fn map_collect<T, U, F>(mode: ExecMode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.iter().map(f).collect(),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                items.par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                items.iter().map(f).collect()
            }
        }
    }
}

/// Map `f` over a range of indices, returning results in index order.
pub fn map_indices<U, F>(mode: ExecMode, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..n).map(f).collect(),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                (0..n).into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n).map(f).collect()
            }
        }
    }
}

/// Maximum of a mapped value over items. `max` is exactly associative, so the
/// parallel reduction is bitwise identical to the sequential one.
pub fn max_over<T, F>(mode: ExecMode, items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.iter().map(f).fold(f64::NEG_INFINITY, f64::max),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                items
                    .par_iter()
                    .map(f)
                    .reduce(|| f64::NEG_INFINITY, f64::max)
            }
            #[cfg(not(feature = "parallel"))]
            {
                items.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
            }
        }
    }
}

/// Minimum analogue of [`max_over`].
pub fn min_over<T, F>(mode: ExecMode, items: &[T], f: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync + Send,
{
    match mode {
        ExecMode::Sequential => items.iter().map(f).fold(f64::INFINITY, f64::min),
        ExecMode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                items.par_iter().map(f).reduce(|| f64::INFINITY, f64::min)
            }
            #[cfg(not(feature = "parallel"))]
            {
                items.iter().map(f).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let items: Vec<u64> = (0..1000).collect();
        let seq = map_collect(ExecMode::Sequential, &items, |x| x * x);
        let par = map_collect(ExecMode::Parallel, &items, |x| x * x);
        assert_eq!(seq, par);

        let ms = max_over(ExecMode::Sequential, &items, |x| (*x as f64).sqrt());
        let mp = max_over(ExecMode::Parallel, &items, |x| (*x as f64).sqrt());
        assert_eq!(ms.to_bits(), mp.to_bits());
    }
}
