//! Sequential / data-parallel execution of independent work items.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] runs on the
//! current rayon pool; without it every mode runs sequentially. Results are
//! always returned in item order, so output never depends on the mode or
//! the number of threads.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `true` when work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Below this many items the per-task overhead outweighs the gain.
const MIN_PARALLEL_ITEMS: usize = 4096;

pub(crate) fn auto_for(items: usize) -> Execution {
    if items >= MIN_PARALLEL_ITEMS {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

pub fn map_items<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Evaluates `f(0), f(1), ..., f(count - 1)`.
pub fn map_range<R, F>(exec: Execution, count: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = map_range(Execution::Sequential, 1000, |i| i * i);
        let b = map_range(Execution::Parallel, 1000, |i| i * i);
        assert_eq!(a, b);
        let items: Vec<u32> = (0..5000).collect();
        assert_eq!(
            map_items(Execution::Sequential, &items, |x| x + 1),
            map_items(Execution::Parallel, &items, |x| x + 1)
        );
    }
}
