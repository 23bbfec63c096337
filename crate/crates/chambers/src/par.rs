//! Runtime switch between the rayon data-parallel path and a plain
//! sequential path.
//!
//! Every reduction routed through this module is associative and
//! commutative (integer sums) or order-preserving (`map_collect`), so the
//! result is identical for any worker count. With the `parallel` feature
//! disabled only the sequential path is compiled and rayon is not linked.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// True when calls on this thread should take the sequential path.
pub fn is_sequential() -> bool {
    if cfg!(not(feature = "parallel")) {
        return true;
    }
    FORCE_SEQUENTIAL.with(|f| f.get())
}

/// Runs `f` with the given worker count: `1` forces the sequential path,
/// `0` means the default pool, anything else installs a dedicated pool.
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    if jobs == 1 || cfg!(not(feature = "parallel")) {
        let prev = FORCE_SEQUENTIAL.with(|c| c.replace(true));
        let out = f();
        FORCE_SEQUENTIAL.with(|c| c.set(prev));
        return out;
    }
    #[cfg(feature = "parallel")]
    {
        if jobs == 0 {
            return f();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool construction");
        pool.install(f)
    }
    #[cfg(not(feature = "parallel"))]
    unreachable!()
}

/// Sum of `f(i)` over `0..items`.
pub fn sum_u64(items: usize, f: impl Fn(usize) -> u64 + Sync + Send) -> u64 {
    #[cfg(feature = "parallel")]
    if !is_sequential() {
        use rayon::prelude::*;
        return (0..items).into_par_iter().map(f).sum();
    }
    (0..items).map(f).sum()
}

/// Sum of `f(i)` over `0..items` with a 128-bit accumulator.
pub fn sum_u128(items: usize, f: impl Fn(usize) -> u128 + Sync + Send) -> u128 {
    #[cfg(feature = "parallel")]
    if !is_sequential() {
        use rayon::prelude::*;
        return (0..items).into_par_iter().map(f).sum();
    }
    (0..items).map(f).sum()
}

/// Order-preserving map over a slice.
pub fn map_collect<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    if !is_sequential() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Order-preserving map over an index range.
pub fn map_range<R: Send>(items: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    if !is_sequential() {
        use rayon::prelude::*;
        return (0..items).into_par_iter().map(f).collect();
    }
    (0..items).map(f).collect()
}

/// Splits `0..total` into `chunk`-sized ranges and sums `f` over them.
/// The chunking is fixed, so seeded work per chunk reproduces exactly.
pub fn chunked_sum_u64(
    total: u64,
    chunk: u64,
    f: impl Fn(std::ops::Range<u64>) -> u64 + Sync + Send,
) -> u64 {
    assert!(chunk > 0);
    let chunks = total.div_ceil(chunk) as usize;
    sum_u64(chunks, |i| {
        let lo = i as u64 * chunk;
        f(lo..(lo + chunk).min(total))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jobs_switch_gives_identical_sums() {
        let f = |i: usize| (i as u64).wrapping_mul(2654435761) % 1000;
        let seq = with_jobs(1, || sum_u64(10_000, f));
        let par = with_jobs(0, || sum_u64(10_000, f));
        assert_eq!(seq, par);
    }

    #[test]
    fn chunked_sum_covers_every_index() {
        let total = 1003;
        let s = chunked_sum_u64(total, 64, |r| r.clone().sum());
        assert_eq!(s, (0..total).sum::<u64>());
    }
}
