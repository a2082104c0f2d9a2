//! Scans, differences, reductions and binary search.
//!
//! The scans and [`sum`] share one fixed blocking: the input is cut into
//! [`SCAN_BLOCK`]-element blocks, block totals are folded left to right, and
//! each block is then accumulated from its offset. The blocking does not
//! depend on the number of worker threads, so results are bit-identical for
//! any pool size, and `inclusive_prefix_sum(w)[N - 1] == sum(w)` exactly.
//! Inputs no longer than one block are a plain left fold.

use std::ops::{Add, Sub};

use num_traits::Zero;
use rayon::prelude::*;

/// Block length for the parallel scans.
pub const SCAN_BLOCK: usize = 4096;

/// Below this length per-element loops run on the calling thread.
pub(crate) const PAR_MIN: usize = 2048;

/// Element types the scans accept: floats and unsigned counts.
pub trait Scannable: Copy + Send + Sync + Zero + Add<Output = Self> {}

impl<T: Copy + Send + Sync + Zero + Add<Output = T>> Scannable for T {}

/// `(0..n).map(f)`, spread over the rayon pool for long inputs.
pub(crate) fn map_indices<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    if n < PAR_MIN {
        (0..n).map(f).collect()
    } else {
        (0..n).into_par_iter().map(f).collect()
    }
}

fn block_offsets<T: Scannable>(w: &[T]) -> Vec<T> {
    let totals: Vec<T> = w
        .par_chunks(SCAN_BLOCK)
        .map(|b| b.iter().fold(T::zero(), |acc, &x| acc + x))
        .collect();
    let mut acc = T::zero();
    totals
        .iter()
        .map(|&t| {
            let off = acc;
            acc = acc + t;
            off
        })
        .collect()
}

pub fn inclusive_prefix_sum<T: Scannable>(w: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); w.len()];
    if w.len() <= SCAN_BLOCK {
        let mut acc = T::zero();
        for (o, &x) in out.iter_mut().zip(w) {
            acc = acc + x;
            *o = acc;
        }
        return out;
    }
    let offsets = block_offsets(w);
    out.par_chunks_mut(SCAN_BLOCK)
        .zip(w.par_chunks(SCAN_BLOCK))
        .zip(offsets.into_par_iter())
        .for_each(|((o, b), mut acc)| {
            for (o, &x) in o.iter_mut().zip(b) {
                acc = acc + x;
                *o = acc;
            }
        });
    out
}

/// `result[0] = 0`, `result[i] = w[0] + ... + w[i - 1]`.
pub fn exclusive_prefix_sum<T: Scannable>(w: &[T]) -> Vec<T> {
    let mut out = inclusive_prefix_sum(w);
    out.rotate_right(1);
    if let Some(first) = out.first_mut() {
        *first = T::zero();
    }
    out
}

/// `result[0] = w[0]`, `result[i] = w[i] - w[i - 1]`.
pub fn adjacent_difference<T>(w: &[T]) -> Vec<T>
where
    T: Copy + Send + Sync + Sub<Output = T>,
{
    let mut out = Vec::with_capacity(w.len());
    if let Some(&first) = w.first() {
        out.push(first);
    }
    if w.len() > PAR_MIN {
        let rest: Vec<T> = w.par_windows(2).map(|p| p[1] - p[0]).collect();
        out.extend(rest);
    } else {
        out.extend(w.windows(2).map(|p| p[1] - p[0]));
    }
    out
}

/// Sum in the same order as the last element of [`inclusive_prefix_sum`].
pub fn sum<T: Scannable>(w: &[T]) -> T {
    if w.len() <= SCAN_BLOCK {
        return w.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let offsets = block_offsets(w);
    let last = (w.len() - 1) / SCAN_BLOCK;
    w[last * SCAN_BLOCK..]
        .iter()
        .fold(offsets[last], |acc, &x| acc + x)
}

/// Pairwise summation over a balanced binary tree of the elements.
///
/// Rounding error grows with `log2 N` rather than `N`.
pub fn stable_sum<T: Scannable>(w: &[T]) -> T {
    const PAR_SPLIT: usize = 1 << 15;
    match w.len() {
        0 => T::zero(),
        1 => w[0],
        n => {
            let (l, r) = w.split_at(n / 2);
            if n > PAR_SPLIT {
                let (a, b) = rayon::join(|| stable_sum(l), || stable_sum(r));
                a + b
            } else {
                stable_sum(l) + stable_sum(r)
            }
        }
    }
}

/// Smallest index `j` with `sorted[j] >= u`.
///
/// `sorted` must be ascending. If `u` exceeds every element the result is
/// clamped to `N - 1`; callers draw `u` from within the range of `sorted`.
pub fn lower_bound<T: PartialOrd + Copy>(sorted: &[T], u: T) -> usize {
    debug_assert!(!sorted.is_empty());
    debug_assert!(sorted.last().is_some_and(|&last| u <= last), "u above the last element");
    sorted.partition_point(|&x| x < u).min(sorted.len() - 1)
}
