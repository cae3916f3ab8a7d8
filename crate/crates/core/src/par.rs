//! Data-parallel map over experiment cells.
//!
//! With the `parallel` feature (default) the map runs on a rayon pool
//! sized by the caller; without it the same API degrades to a plain
//! sequential loop so the crate builds on targets where rayon is
//! unwanted. Output order matches input order in both modes.

#[cfg(feature = "parallel")]
pub(crate) fn map_cells<T, R, F>(items: Vec<T>, workers: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if workers <= 1 {
        return items.into_iter().map(f).collect();
    }
    // A local pool keeps the worker count a per-call decision instead of
    // a process-global one.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build worker pool");
    pool.install(|| items.into_par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_cells<T, R, F>(items: Vec<T>, _workers: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_input_order() {
        let squares = map_cells((0..100u64).collect(), 4, |x| x * x);
        assert_eq!(squares, (0..100u64).map(|x| x * x).collect::<Vec<_>>());
    }

    #[test]
    fn single_worker_matches_many() {
        let seq = map_cells((0..50i64).collect(), 1, |x| x * 3 - 7);
        let par = map_cells((0..50i64).collect(), 8, |x| x * 3 - 7);
        assert_eq!(seq, par);
    }
}
