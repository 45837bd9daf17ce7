//! Execution policy for data-parallel kernels.
//!
//! Every parallel entry point in the crate takes a [`Parallelism`] and must
//! produce results that are independent of the worker count. Reductions used
//! here are associative and commutative (counts, flags, min-by-rank), so the
//! rayon tree reduction and the sequential left fold agree exactly.

use std::ops::Range;

/// How to run a kernel.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// Plain sequential loops, no rayon involvement.
    Sequential,
    /// The rayon global pool. Falls back to sequential when the `parallel`
    /// feature is disabled.
    #[default]
    Auto,
    /// A dedicated pool with exactly this many workers. `Threads(0)` behaves
    /// like `Auto`; `Threads(1)` runs the sequential path.
    Threads(usize),
}

impl Parallelism {
    pub fn is_sequential(self) -> bool {
        if !cfg!(feature = "parallel") {
            return true;
        }
        matches!(self, Parallelism::Sequential | Parallelism::Threads(1))
    }
}

/// Default number of items handed to one worker at a time. Large enough to
/// amortize scheduling, small enough to balance multi-million-element sweeps.
pub(crate) const CHUNK: u64 = 1 << 14;

/// Run `f`, installing a dedicated pool when an explicit thread count was
/// requested. Inside `f`, rayon parallel iterators use the installed pool.
#[cfg(feature = "parallel")]
pub(crate) fn run<R: Send>(par: Parallelism, f: impl FnOnce() -> R + Send) -> R {
    match par {
        Parallelism::Threads(n) if n > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("failed to build worker pool")
            .install(f),
        _ => f(),
    }
}

/// Fill `out` chunk by chunk; `fill` receives the absolute start index of its
/// slice. Chunks are disjoint, so the parallel and sequential paths write the
/// same bytes.
pub(crate) fn fill_chunks<T, F>(par: Parallelism, out: &mut [T], fill: F)
where
    T: Send,
    F: Fn(u64, &mut [T]) + Sync,
{
    let chunk = CHUNK as usize;
    if par.is_sequential() {
        for (ci, sl) in out.chunks_mut(chunk).enumerate() {
            fill((ci * chunk) as u64, sl);
        }
        return;
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        run(par, || {
            out.par_chunks_mut(chunk)
                .enumerate()
                .for_each(|(ci, sl)| fill((ci * chunk) as u64, sl));
        });
    }
}

/// Map disjoint index ranges covering `0..n` through `work` and combine with
/// `merge`. `merge` must be associative and commutative with `identity()` as
/// neutral element; under that contract the result is independent of both
/// chunking and worker count.
pub(crate) fn map_reduce<R, W, M, I>(par: Parallelism, n: u64, work: W, identity: I, merge: M) -> R
where
    R: Send,
    W: Fn(Range<u64>) -> R + Sync,
    M: Fn(R, R) -> R + Sync + Send,
    I: Fn() -> R + Sync + Send,
{
    if par.is_sequential() {
        let mut acc = identity();
        let mut s = 0;
        while s < n {
            let e = (s + CHUNK).min(n);
            acc = merge(acc, work(s..e));
            s = e;
        }
        return acc;
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        return run(par, || {
            let nchunks = n.div_ceil(CHUNK);
            (0..nchunks)
                .into_par_iter()
                .map(|ci| work(ci * CHUNK..((ci + 1) * CHUNK).min(n)))
                .reduce(&identity, &merge)
        });
    }
    #[cfg(not(feature = "parallel"))]
    unreachable!("is_sequential() is always true without the parallel feature")
}
