use rand::Rng;

use crate::primitives::map_indices;
use crate::rng::RngStream;
use crate::{AncestryVector, Error, Real, Result, WeightVector};

/// Bias tolerance used when none is given: one percent of `p*`.
pub fn default_epsilon(p_star: f64) -> f64 {
    p_star * 1e-2
}

/// Number of Metropolis steps that bounds the selection bias of a particle
/// holding normalised weight `p_star` by `epsilon`.
///
/// The chain is reduced to a two-state process (at a maximum-weight
/// particle or not) with leave and enter probabilities
/// `alpha = (1 - p*) / (N p*)` and `beta = 1 / N`. Its transient term decays
/// as `lambda^B` with `lambda = 1 - alpha - beta`, and the smallest integer
/// `B` satisfying `lambda^B max(alpha, beta) / (alpha + beta) < epsilon` is
/// returned.
pub fn metropolis_num_steps(p_star: f64, epsilon: f64, n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least two particles, got {n}")));
    }
    if !(p_star > 0.0 && p_star <= 1.0) {
        return Err(Error::InvalidParameter(format!("p* must lie in (0, 1], got {p_star}")));
    }
    if !(epsilon > 0.0 && epsilon < p_star) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, p*) = (0, {p_star}), got {epsilon}"
        )));
    }
    let nf = n as f64;
    let alpha = (1.0 - p_star) / (p_star * nf);
    let beta = 1.0 / nf;
    let lambda = 1.0 - alpha - beta;
    if lambda <= 0.0 {
        return Err(Error::MetropolisBound { p_star, n, lambda });
    }
    let threshold = (epsilon * (alpha + beta) / alpha.max(beta)).ln() / lambda.ln();
    // strict inequality: B = t is not enough when t is an integer
    Ok(if threshold < 0.0 { 1 } else { threshold.floor() as usize + 1 })
}

/// `p*`, `epsilon` and the derived step count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetropolisConfig {
    pub p_star: f64,
    pub epsilon: f64,
    pub steps: usize,
}

impl MetropolisConfig {
    pub fn new(p_star: f64, epsilon: f64, n: usize) -> Result<Self> {
        let steps = metropolis_num_steps(p_star, epsilon, n)?;
        Ok(Self { p_star, epsilon, steps })
    }

    pub fn with_default_epsilon(p_star: f64, n: usize) -> Result<Self> {
        Self::new(p_star, default_epsilon(p_star), n)
    }

    /// A fixed step count, bypassing the bias bound.
    pub fn with_steps(steps: usize) -> Self {
        Self { p_star: f64::NAN, epsilon: f64::NAN, steps }
    }
}

/// `N` independent Metropolis chains of `steps` steps each, with uniform
/// proposals over all particles. Chain `i` starts at `i` and its final
/// state is `a[i]`. Only ratios of two weights are ever formed; no
/// collective operation over `w` takes place.
///
/// A chain sitting on a zero-weight particle accepts any proposal. The
/// acceptance uniform is drawn from `(0, 1]`, so a zero-weight proposal is
/// never accepted.
pub fn metropolis_ancestors<T: Real>(w: &WeightVector<T>, steps: usize, rng: &RngStream) -> AncestryVector {
    let n = w.len();
    let a = map_indices(n, |i| {
        let mut rng = rng.substream(i as u64, 0);
        let mut k = i;
        for _ in 0..steps {
            let u = T::uniform_open_closed(&mut rng);
            let j = rng.random_range(0..n);
            if w[k] == T::zero() || u <= w[j] / w[k] {
                k = j;
            }
        }
        k
    });
    AncestryVector::from_unchecked(a)
}
