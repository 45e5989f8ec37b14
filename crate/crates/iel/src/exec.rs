use iel_core::Executor;
use rayon::prelude::*;

/// Runs jobs on the current rayon pool; results stay in index order.
#[derive(Clone, Copy, Debug, Default)]
pub struct Parallel;

impl Executor for Parallel {
    fn map_collect<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).into_par_iter().map(f).collect()
    }
}

/// A pool with `threads` workers (0 picks rayon's default).
pub fn pool(threads: usize) -> Result<rayon::ThreadPool, rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_order() {
        let p = pool(3).unwrap();
        let v = p.install(|| Parallel.map_collect(1000, |i| i * 2));
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }
}
