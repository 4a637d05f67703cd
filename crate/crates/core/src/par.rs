//! Execution policy for the per-target scans.
//!
//! Work is always partitioned by index and results are written back by
//! index, so both policies produce identical output.

use crate::error::{invalid, Result};

/// How independent per-target work is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    /// Plain loop on the calling thread.
    Sequential,
    /// Rayon data parallelism. Falls back to [`Exec::Sequential`] when the
    /// `parallel` feature is off.
    #[default]
    Parallel,
}

impl Exec {
    /// True when this policy actually runs on the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Applies `f` to every element of `items` with its index.
pub(crate) fn for_each_mut<T, F>(exec: Exec, items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        items.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
        return;
    }
    let _ = exec;
    items.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
}

/// Smallest `k` in `0..=k_max` with `pred(k)`.
pub(crate) fn find_first<F>(exec: Exec, k_max: u64, pred: F) -> Option<u64>
where
    F: Fn(u64) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..=k_max).into_par_iter().find_first(|&k| pred(k));
    }
    let _ = exec;
    (0..=k_max).find(|&k| pred(k))
}

/// Sizes the global rayon pool. Has no effect without the `parallel` feature.
/// Fails if the pool was already built with a different size.
pub fn configure_threads(threads: usize) -> Result<()> {
    if threads == 0 {
        return Err(invalid("thread count must be at least 1"));
    }
    #[cfg(feature = "parallel")]
    {
        let built = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        if built.is_err() && rayon::current_num_threads() != threads {
            return Err(invalid(format!(
                "thread pool already running with {} threads",
                rayon::current_num_threads()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(find_first(exec, 1000, |k| k * k > 50), Some(8));
            assert_eq!(find_first(exec, 3, |_| false), None);
            let mut v = vec![0usize; 4];
            for_each_mut(exec, &mut v, |i, x| *x = 2 * i);
            assert_eq!(v, vec![0, 2, 4, 6]);
        }
        assert!(configure_threads(0).is_err());
    }
}
