//! Deterministic parallel reductions.
//!
//! Work is split into chunks whose boundaries depend only on the input
//! length and chunk size. Each chunk is reduced sequentially, and the chunk
//! partials are combined by a fixed pairwise tree, so results are bitwise
//! identical for any thread count.

use std::ops::{Add, Range};

use rayon::prelude::*;

/// Pairwise (cascade) sum of a slice in a fixed tree order.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::default(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sum `f(chunk)` over consecutive chunks of `0..len`.
pub fn chunked_sum<T, F>(len: u64, chunk: u64, f: F) -> T
where
    T: Copy + Default + Add<Output = T> + Send,
    F: Fn(Range<u64>) -> T + Sync,
{
    assert!(chunk > 0);
    let chunks = len.div_ceil(chunk);
    let partials: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| f(c * chunk..((c + 1) * chunk).min(len)))
        .collect();
    pairwise_sum(&partials)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
