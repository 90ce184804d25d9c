//! Execution strategies for the data-parallel kernels.
//!
//! Every hot loop in the crate (coboundary assembly, Gram products, walk
//! block expansion, convergence sweeps) is written against [`Exec`], so the
//! same kernel can run on rayon or on a plain iterator. [`DefaultExec`] picks
//! rayon when the `parallel` feature is enabled and falls back to
//! [`Sequential`] otherwise. Results are always collected in index order, so
//! both strategies produce bitwise identical output.

/// A strategy for evaluating an index-parallel map.
pub trait Exec {
    /// Evaluates `f(0), f(1), ..., f(n - 1)` and returns the results in order.
    fn map<T, F>(n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Plain iterator evaluation on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Exec for Sequential {
    fn map<T, F>(n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

/// Work-stealing evaluation on the global rayon pool.
#[cfg(feature = "parallel")]
#[derive(Clone, Copy, Debug, Default)]
pub struct Parallel;

#[cfg(feature = "parallel")]
impl Exec for Parallel {
    fn map<T, F>(n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
}

#[cfg(feature = "parallel")]
pub type DefaultExec = Parallel;

#[cfg(not(feature = "parallel"))]
pub type DefaultExec = Sequential;
