use crate::primitives::{exclusive_prefix_sum, inclusive_prefix_sum, lower_bound, map_indices};
use crate::rng::RngStream;
use crate::{AncestryVector, Real, WeightVector};

/// Independent categorical draw for every offspring: one inclusive scan,
/// then a binary search per element. `O(N log N)`.
pub fn multinomial_ancestors<T: Real>(w: &WeightVector<T>, rng: &RngStream) -> AncestryVector {
    let cum = inclusive_prefix_sum(w);
    let total = cum[cum.len() - 1];
    // u in (0, total] so a zero-weight particle (empty interval) is never hit
    let a = map_indices(w.len(), |i| {
        let u = total * T::uniform_open_closed(&mut rng.substream(i as u64, 0));
        lower_bound(&cum, u)
    });
    AncestryVector::from_unchecked(a)
}

/// Multinomial resampling with caller-supplied draws, already scaled to
/// the range of the cumulative weights.
pub fn multinomial_ancestors_from_draws<T: Real>(w: &WeightVector<T>, draws: &[T]) -> AncestryVector {
    let cum = inclusive_prefix_sum(w);
    AncestryVector::from_unchecked(draws.iter().map(|&u| lower_bound(&cum, u)).collect())
}

/// Single-pass `O(N)` multinomial resampling.
///
/// Uniforms are generated already sorted in descending order by
/// accumulating logarithms of their order statistics, and matched against
/// the exclusive scan in one downward sweep. The result is sorted
/// non-decreasing. Serial by construction; all draws come from
/// `rng.substream(0, 0)`.
pub fn multinomial_ancestors_serial<T: Real>(w: &WeightVector<T>, rng: &RngStream) -> AncestryVector {
    let n = w.len();
    let starts = exclusive_prefix_sum(w);
    let total = starts[n - 1] + w[n - 1];
    let mut rng = rng.substream(0, 0);
    let mut a = vec![0; n];
    let mut ln_max = T::zero();
    let mut j = n - 1;
    for i in (1..=n).rev() {
        ln_max = ln_max + T::uniform_open(&mut rng).ln() / T::from_count(i);
        let u = total * ln_max.exp();
        while j > 0 && u < starts[j] {
            j -= 1;
        }
        a[i - 1] = j;
    }
    AncestryVector::from_unchecked(a)
}
