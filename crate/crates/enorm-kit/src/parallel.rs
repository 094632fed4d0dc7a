//! Order-preserving parallel map over grid points.
//!
//! Runs on rayon's global pool; the CLI sizes that pool from
//! `ENORM_KIT_THREADS`. Each item is computed independently, so the output is
//! bit-identical to a sequential loop.

use rayon::prelude::*;

pub(crate) fn map<A, B, F>(items: &[A], f: F) -> Vec<B>
where
    A: Sync,
    B: Send,
    F: Fn(&A) -> B + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Installs a global pool with `threads` workers; later calls are ignored.
pub fn configure_threads(threads: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build_global();
}
