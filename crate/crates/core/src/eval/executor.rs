//! Deterministic fan-out over independent work items.

use rayon::prelude::*;

/// Runs `f` over the items on a pool of `workers` threads and returns the
/// results in item order. Work items carry their own seeds, so the outcome
/// does not depend on scheduling.
pub fn run_parallel<T, R, F>(workers: usize, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    if workers <= 1 {
        return items.into_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| items.into_par_iter().map(f).collect())
}

/// Worker count: explicit setting, else the `MACROCAST_WORKERS` variable,
/// else all available cores.
pub fn resolve_workers(requested: Option<usize>) -> usize {
    if let Some(w) = requested {
        return w.max(1);
    }
    if let Ok(env) = std::env::var("MACROCAST_WORKERS") {
        if let Ok(w) = env.trim().parse::<usize>() {
            return w.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
