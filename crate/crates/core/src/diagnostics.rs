//! Effective sample size, the offspring mean-square error, and the
//! synthetic Gaussian weight sets used to exercise the resamplers.
//!
//! Weight sets follow a standard normal prior and a unit-variance Gaussian
//! likelihood: `x ~ N(0, 1)` and `w = phi(x - y)` with `phi` the standard
//! normal density. Their maximum, mean and relative variance are known in
//! closed form, which is what drives the Metropolis step count and the
//! rejection bound in the benchmark.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::primitives::{map_indices, stable_sum, sum};
use crate::rng::RngStream;
use crate::{AncestryVector, Error, OffspringVector, Real, Result, WeightVector};

/// `Sum(w)^2 / (w . w)`, between 1 and `N`.
pub fn ess<T: Real>(w: &WeightVector<T>) -> T {
    let s = sum(w);
    let sq: Vec<T> = w.iter().map(|&x| x * x).collect();
    s * s / sum(&sq)
}

/// `(1/N) sum_i (o[i]/N - w[i]/Sum(w))^2`, computed in double precision.
pub fn resampling_mse<T: Real>(o: &OffspringVector, w: &WeightVector<T>) -> Result<f64> {
    if o.len() != w.len() {
        return Err(Error::LengthMismatch { left: o.len(), right: w.len() });
    }
    let counts: Vec<f64> = o.iter().map(|&c| c as f64).collect();
    Ok(mse_of_counts(&counts, w))
}

/// Offspring error for a weighted resampling outcome.
///
/// Each parent's count is replaced by `N` times its share of the offspring
/// weights; with unit offspring weights this is [`resampling_mse`] of the
/// ancestry's histogram.
pub fn resampling_mse_weighted<T: Real>(
    a: &AncestryVector,
    offspring_weights: &WeightVector<T>,
    w: &WeightVector<T>,
) -> Result<f64> {
    let n = w.len();
    if a.len() != n || offspring_weights.len() != n {
        return Err(Error::LengthMismatch { left: a.len(), right: n });
    }
    let v: Vec<f64> = offspring_weights.iter().map(|&x| x.as_f64()).collect();
    let total = stable_sum(&v);
    let mut counts = vec![0.0; n];
    for (&p, &x) in a.iter().zip(&v) {
        counts[p] += x;
    }
    for c in &mut counts {
        *c *= n as f64 / total;
    }
    Ok(mse_of_counts(&counts, w))
}

fn mse_of_counts<T: Real>(counts: &[f64], w: &WeightVector<T>) -> f64 {
    let n = w.len() as f64;
    let w: Vec<f64> = w.iter().map(|&x| x.as_f64()).collect();
    let total = stable_sum(&w);
    let sq: Vec<f64> = counts
        .iter()
        .zip(&w)
        .map(|(&c, &x)| {
            let d = c / n - x / total;
            d * d
        })
        .collect();
    stable_sum(&sq) / n
}

/// Particle count, observation and seed of one synthetic weight set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSetSpec {
    pub n: usize,
    pub y: f64,
    pub seed: u64,
}

/// Standard normal density of `x - y`.
pub fn gaussian_weight(x: f64, y: f64) -> f64 {
    let d = x - y;
    (-0.5 * d * d).exp() / (2.0 * PI).sqrt()
}

/// Weights `phi(x[i] - y)` for given prior draws.
pub fn weights_from_states<T: Real>(x: &[f64], y: f64) -> Vec<T> {
    x.iter().map(|&x| T::lit(gaussian_weight(x, y))).collect()
}

/// Draw `x[i] ~ N(0, 1)` from substream `(i, 0)` of the set's seed and
/// weight each against `y`.
pub fn simulate_weight_set<T: Real>(spec: &WeightSetSpec) -> Result<WeightVector<T>> {
    if spec.n == 0 {
        return Err(Error::Empty);
    }
    let rng = RngStream::new(spec.seed);
    let x = map_indices(spec.n, |i| {
        let z: f64 = StandardNormal.sample(&mut rng.substream(i as u64, 0));
        z
    });
    WeightVector::new(weights_from_states(&x, spec.y))
}

/// Largest possible synthetic weight, `1 / sqrt(2 pi)`.
pub fn sup_weight<T: Real>() -> T {
    T::lit(1.0 / (2.0 * PI).sqrt())
}

/// Mean synthetic weight, `exp(-y^2 / 4) / (2 sqrt(pi))`.
pub fn expected_weight(y: f64) -> f64 {
    (-0.25 * y * y).exp() / (2.0 * PI.sqrt())
}

/// Variance of `w / E(w)`, `(2 / sqrt(3)) exp(y^2 / 6) - 1`.
pub fn relative_weight_variance(y: f64) -> f64 {
    2.0 / 3f64.sqrt() * (y * y / 6.0).exp() - 1.0
}

/// Bound on the largest normalised weight, `sup w / (N E(w))`, clamped to 1.
pub fn max_normalised_weight(y: f64, n: usize) -> f64 {
    (sup_weight::<f64>() / (n as f64 * expected_weight(y))).min(1.0)
}

/// Exponentiate log-weights after subtracting their maximum, so the
/// largest weight is exactly one. `-inf` maps to a zero weight.
pub fn logweights_to_weights<T: Real>(lw: &[T]) -> Result<WeightVector<T>> {
    if lw.is_empty() {
        return Err(Error::Empty);
    }
    if let Some((index, &value)) = lw.iter().enumerate().find(|(_, x)| x.is_nan() || **x == T::infinity()) {
        return Err(Error::InvalidLogWeight { index, value: value.as_f64() });
    }
    let max = lw.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return Err(Error::AllNegInfinite);
    }
    Ok(WeightVector::from_unchecked(map_indices(lw.len(), |i| (lw[i] - max).exp())))
}

/// Ascending copy of the weights.
pub fn sort_weights<T: Real>(w: &WeightVector<T>) -> WeightVector<T> {
    let mut v = w.as_slice().to_vec();
    v.par_sort_unstable_by(|a, b| a.partial_cmp(b).expect("weights are finite"));
    WeightVector::from_unchecked(v)
}
