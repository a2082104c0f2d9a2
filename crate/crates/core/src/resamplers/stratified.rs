use crate::primitives::{inclusive_prefix_sum, map_indices};
use crate::rng::RngStream;
use crate::{CumulativeOffspring, Real, WeightVector};

/// `min(N, floor(r + u))`, evaluated in the precision of `T`.
///
/// In single precision `u` stops registering against `r` once `r` reaches
/// about 2^24, and rounding can push `floor(r + u)` past `N`; the clamp
/// keeps the final cumulative count at `N`.
pub fn stratum_offset_kernel<T: Real>(r: T, u: T, n: usize) -> usize {
    let x = stratum_offset_unclamped(r, u);
    if x >= T::from_count(n) {
        n
    } else {
        x.to_usize().unwrap_or(0)
    }
}

/// `floor(r + u)` with no clamp.
pub fn stratum_offset_unclamped<T: Real>(r: T, u: T) -> T {
    (r + u).floor()
}

/// Position of each cumulative weight on the `[0, N]` scale of the strata.
fn positions<T: Real>(w: &WeightVector<T>) -> Vec<T> {
    let cum = inclusive_prefix_sum(w);
    let n = T::from_count(w.len());
    let total = cum[cum.len() - 1];
    map_indices(cum.len(), |i| {
        if cum[i] >= total {
            n
        } else {
            (n * cum[i] / total).min(n)
        }
    })
}

fn cumulative_with<T, F>(w: &WeightVector<T>, offset: F) -> CumulativeOffspring
where
    T: Real,
    F: Fn(usize) -> T + Sync + Send,
{
    let n = w.len();
    let r = positions(w);
    let o = map_indices(n, |i| {
        let stratum = r[i].floor().to_usize().unwrap_or(0).min(n - 1);
        stratum_offset_kernel(r[i], offset(stratum), n)
    });
    CumulativeOffspring::from_unchecked(o)
}

/// Stratified resampling: one independent uniform offset per stratum.
///
/// The offset of stratum `k` is the first draw of `rng.substream(k, 0)`,
/// so each element computes the offset it needs on its own.
pub fn stratified_cumulative_offspring<T: Real>(w: &WeightVector<T>, rng: &RngStream) -> CumulativeOffspring {
    cumulative_with(w, |k| T::uniform(&mut rng.substream(k as u64, 0)))
}

/// Stratified resampling with explicit per-stratum offsets in `[0, 1)`.
pub fn stratified_from_offsets<T: Real>(w: &WeightVector<T>, offsets: &[T]) -> CumulativeOffspring {
    assert_eq!(offsets.len(), w.len(), "one offset per stratum");
    cumulative_with(w, |k| offsets[k])
}

/// Systematic resampling: a single offset shared by all strata.
pub fn systematic_cumulative_offspring<T: Real>(w: &WeightVector<T>, rng: &RngStream) -> CumulativeOffspring {
    systematic_from_offset(w, T::uniform(&mut rng.substream(0, 0)))
}

pub fn systematic_from_offset<T: Real>(w: &WeightVector<T>, u: T) -> CumulativeOffspring {
    cumulative_with(w, |_| u)
}
