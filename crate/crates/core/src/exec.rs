//! Data-parallel helpers.
//!
//! Every sweep in the crate (tau grids, randomized operator families,
//! scenario parameters) goes through [`map`]. With the `parallel` feature the
//! work is spread over the rayon pool; without it, or with
//! [`Strategy::Sequential`], items are evaluated in order on the calling
//! thread. Output order always matches input order.

/// How a sweep is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Sequential,
    #[default]
    Parallel,
}

impl Strategy {
    /// `Parallel` when the crate was built with rayon, otherwise `Sequential`.
    pub fn available() -> Self {
        if cfg!(feature = "parallel") {
            Strategy::Parallel
        } else {
            Strategy::Sequential
        }
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(strategy: Strategy, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Order-preserving map over an index range.
pub fn map_range<R, F>(strategy: Strategy, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_preserve_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map(Strategy::Sequential, &xs, |x| x * x);
        let b = map(Strategy::Parallel, &xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(map_range(Strategy::Parallel, 5, |i| i + 1), vec![1, 2, 3, 4, 5]);
    }
}
