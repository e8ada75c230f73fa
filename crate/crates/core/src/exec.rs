//! Sequential and data-parallel reductions over index ranges.
//!
//! With the `parallel` feature disabled, [`Execution::Parallel`] runs the
//! sequential path.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Largest finite `f(i)` over `0..n`; `−∞` when none is finite.
    pub fn max_over<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let keep = |v: f64| if v.is_nan() { f64::NEG_INFINITY } else { v };
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n)
                .into_par_iter()
                .map(|i| keep(f(i)))
                .reduce(|| f64::NEG_INFINITY, f64::max),
            _ => (0..n).map(|i| keep(f(i))).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Smallest `f(i)` over `0..n`; `+∞` when none is finite.
    pub fn min_over<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        -self.max_over(n, |i| -f(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree() {
        let f = |i: usize| ((i as f64) * 0.37).sin();
        let a = Execution::Sequential.max_over(10_000, f);
        let b = Execution::Parallel.max_over(10_000, f);
        assert_eq!(a, b);
        assert_eq!(
            Execution::Sequential.min_over(10_000, f),
            Execution::Parallel.min_over(10_000, f)
        );
    }

    #[test]
    fn nan_entries_are_skipped() {
        let v = Execution::Parallel.max_over(3, |i| if i == 1 { f64::NAN } else { i as f64 });
        assert_eq!(v, 2.0);
        assert_eq!(
            Execution::Sequential.max_over(0, |_| 1.0),
            f64::NEG_INFINITY
        );
    }
}
