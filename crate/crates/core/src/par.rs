//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] runs on the rayon
//! pool; without it every call falls back to a sequential loop. Results never
//! depend on the execution mode.

use std::ops::Range;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// `Parallel` when more than one job is requested.
    pub fn from_jobs(jobs: usize) -> Self {
        if jobs > 1 {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Maps every index of `range` and folds the results with an associative
/// `combine`.
pub fn map_reduce<T, M, C>(exec: Exec, range: Range<u64>, identity: T, map: M, combine: C) -> T
where
    T: Send + Sync + Clone,
    M: Fn(u64) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            range
                .into_par_iter()
                .map(&map)
                .reduce(|| identity.clone(), &combine)
        }
        _ => range.map(map).fold(identity, combine),
    }
}

/// First index (lowest) in `range` for which `find` returns `Some`.
pub fn find_first<T, F>(exec: Exec, range: Range<u64>, find: F) -> Option<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            range.into_par_iter().find_map_first(&find)
        }
        _ => range.into_iter().find_map(find),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let sum = |e| map_reduce(e, 0..1000, 0u64, |i| i * i, |a, b| a + b);
        assert_eq!(sum(Exec::Sequential), sum(Exec::Parallel));
        let f = |e| find_first(e, 0..1000, |i| (i % 97 == 3 && i > 10).then_some(i));
        assert_eq!(f(Exec::Sequential), Some(100));
        assert_eq!(f(Exec::Parallel), Some(100));
    }
}
