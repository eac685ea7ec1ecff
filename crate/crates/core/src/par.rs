//! Data-parallel helpers for grid kernels.
//!
//! With the `parallel` feature the work is spread over rayon's pool; without
//! it every kernel runs sequentially. Reductions are always computed as
//! per-chunk partial sums combined in index order, so results are bitwise
//! identical regardless of the thread count or the chosen [`Execution`].

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How grid kernels are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise
    /// identical to [`Execution::Sequential`].
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Calls `f(chunk_index, chunk)` on consecutive `chunk`-sized pieces of `data`.
    pub fn for_each_chunk<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => data
                .par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c)),
            _ => data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c)),
        }
    }

    /// Evaluates `f` on `0..count` and returns the results in index order.
    pub fn map_collect<T, F>(self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..count).into_par_iter().map(f).collect(),
            _ => (0..count).map(f).collect(),
        }
    }

    /// Sums `f(i)` for `i in 0..count` with a fixed combination order.
    pub fn ordered_sum<const N: usize, F>(self, count: usize, f: F) -> [f64; N]
    where
        F: Fn(usize) -> [f64; N] + Sync + Send,
    {
        self.map_collect(count, f)
            .into_iter()
            .fold([0.0; N], |mut acc, part| {
                for (a, p) in acc.iter_mut().zip(part) {
                    *a += p;
                }
                acc
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_sum_is_identical_across_policies() {
        let f = |i: usize| [((i as f64) * 0.1).sin(), 1.0 / (1.0 + i as f64)];
        let a = Execution::Sequential.ordered_sum(1000, f);
        let b = Execution::Parallel.ordered_sum(1000, f);
        assert_eq!(a[0].to_bits(), b[0].to_bits());
        assert_eq!(a[1].to_bits(), b[1].to_bits());
    }

    #[test]
    fn chunks_cover_data() {
        let mut v = vec![0usize; 12];
        Execution::default().for_each_chunk(&mut v, 4, |i, c| c.iter_mut().for_each(|x| *x = i));
        assert_eq!(v, vec![0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]);
    }
}
