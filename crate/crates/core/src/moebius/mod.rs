//! The Möbius sieve, Davenport and short-interval correlations, trigonometric
//! approximation of residue arcs, and the correlation of `μ` with orbits of a
//! skew product.

mod arcs;
mod corr;
mod disjoint;
mod sieve;

pub use arcs::{
    arc_family_trigpoly, arc_indicator_trigpoly, arc_indicator_trigpoly_capped, ArcApproximation, ArcFamily,
    CircleArc, DEFAULT_MAX_DEGREE,
};
pub use corr::{beta_phase, davenport_avg, davenport_avg_phase, short_interval_corr, short_interval_corr_phase};
pub use disjoint::{
    disjointness_stat, window_decomp_report, window_decomp_stat, TestFunction, WindowDecomp, ANCHOR,
    MAX_WINDOW_WORK,
};
pub use sieve::{sieve_mu, sieve_mu_with_budget, MoebiusTable, Ones, Weights, DEFAULT_MEMORY_BUDGET};

/// Work unit of the parallel loops; also the re-anchoring period of orbits.
pub(crate) const BLOCK: usize = 1 << 16;

/// Runs `f(lo, hi)` on the blocks `[lo, hi)` tiling `0..n` across threads and
/// returns the results in block order, so reductions stay deterministic.
pub(crate) fn par_blocks<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize) -> T + Sync,
{
    let blocks: Vec<(usize, usize)> = (0..n.div_ceil(BLOCK))
        .map(|i| (i * BLOCK, ((i + 1) * BLOCK).min(n)))
        .collect();
    let threads = std::thread::available_parallelism().map_or(1, |t| t.get()).min(16);
    if threads <= 1 || blocks.len() <= 1 {
        return blocks.into_iter().map(|(lo, hi)| f(lo, hi)).collect();
    }
    let per = blocks.len().div_ceil(threads);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = blocks
            .chunks(per)
            .map(|group| s.spawn(move || group.iter().map(|&(lo, hi)| f(lo, hi)).collect::<Vec<T>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
