//! Job fan-out for independent runs (folds, seeds).
//!
//! With the `parallel` feature, [`Execution::Parallel`] maps jobs over the
//! rayon pool; without it, every execution mode runs sequentially. Results
//! come back in job order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

pub fn run_jobs<T, R, F>(exec: Execution, jobs: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => jobs.into_par_iter().map(f).collect(),
        _ => jobs.into_iter().map(f).collect(),
    }
}
