//! The five resampling algorithms.
//!
//! Multinomial, Metropolis and rejection resampling produce ancestry
//! vectors; stratified and systematic resampling produce cumulative
//! offspring vectors. [`resample_ancestors`] runs any of them behind a
//! [`ResamplerConfig`] and always hands back an ancestry vector.
//!
//! Each resampler draws from `rng.substream(i, 0)` for element `i` (or
//! `substream(0, 0)` for the single-stream algorithms), so outputs are
//! pure functions of the weights and the seed.

mod metropolis;
mod multinomial;
mod rejection;
mod stratified;

use std::fmt;
use std::str::FromStr;

pub use metropolis::{default_epsilon, metropolis_ancestors, metropolis_num_steps, MetropolisConfig};
pub use multinomial::{multinomial_ancestors, multinomial_ancestors_from_draws, multinomial_ancestors_serial};
pub use rejection::{
    rejection_ancestors, rejection_ancestors_capped, rejection_ancestors_capped_counted,
    rejection_ancestors_counted,
};
pub use stratified::{
    stratified_cumulative_offspring, stratified_from_offsets, stratum_offset_kernel,
    stratum_offset_unclamped, systematic_cumulative_offspring, systematic_from_offset,
};

use crate::ancestry::cumulative_offspring_to_ancestors;
use crate::rng::RngStream;
use crate::{AncestryVector, Error, Real, Result, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Multinomial,
    MultinomialSerial,
    Stratified,
    Systematic,
    Metropolis,
    Rejection,
    RejectionCapped,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Multinomial,
        Algorithm::MultinomialSerial,
        Algorithm::Stratified,
        Algorithm::Systematic,
        Algorithm::Metropolis,
        Algorithm::Rejection,
        Algorithm::RejectionCapped,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Multinomial => "multinomial",
            Algorithm::MultinomialSerial => "multinomial-serial",
            Algorithm::Stratified => "stratified",
            Algorithm::Systematic => "systematic",
            Algorithm::Metropolis => "metropolis",
            Algorithm::Rejection => "rejection",
            Algorithm::RejectionCapped => "rejection-capped",
        }
    }

    /// Whether the algorithm delivers cumulative offspring rather than ancestors.
    pub fn is_offspring_based(self) -> bool {
        matches!(self, Algorithm::Stratified | Algorithm::Systematic)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::UnknownAlgorithm(s.to_string()))
    }
}

/// An algorithm together with the parameters it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResamplerConfig {
    Multinomial,
    MultinomialSerial,
    Stratified,
    Systematic,
    Metropolis { steps: usize },
    Rejection { sup_w: f64 },
    RejectionCapped { sup_v: f64 },
}

impl ResamplerConfig {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            ResamplerConfig::Multinomial => Algorithm::Multinomial,
            ResamplerConfig::MultinomialSerial => Algorithm::MultinomialSerial,
            ResamplerConfig::Stratified => Algorithm::Stratified,
            ResamplerConfig::Systematic => Algorithm::Systematic,
            ResamplerConfig::Metropolis { .. } => Algorithm::Metropolis,
            ResamplerConfig::Rejection { .. } => Algorithm::Rejection,
            ResamplerConfig::RejectionCapped { .. } => Algorithm::RejectionCapped,
        }
    }
}

/// Output of [`resample_ancestors`].
#[derive(Debug, Clone)]
pub struct Resampled<T> {
    pub ancestors: AncestryVector,
    /// Importance weights of the offspring, for `RejectionCapped` only;
    /// every other resampler leaves its output unweighted.
    pub weights: Option<WeightVector<T>>,
    /// Total number of proposals made by the rejection resamplers.
    pub proposals: Option<u64>,
}

pub fn resample_ancestors<T: Real>(
    w: &WeightVector<T>,
    config: &ResamplerConfig,
    rng: &RngStream,
) -> Result<Resampled<T>> {
    let unweighted = |ancestors| Resampled { ancestors, weights: None, proposals: None };
    Ok(match *config {
        ResamplerConfig::Multinomial => unweighted(multinomial_ancestors(w, rng)),
        ResamplerConfig::MultinomialSerial => unweighted(multinomial_ancestors_serial(w, rng)),
        ResamplerConfig::Stratified => {
            unweighted(cumulative_offspring_to_ancestors(&stratified_cumulative_offspring(w, rng)))
        }
        ResamplerConfig::Systematic => {
            unweighted(cumulative_offspring_to_ancestors(&systematic_cumulative_offspring(w, rng)))
        }
        ResamplerConfig::Metropolis { steps } => unweighted(metropolis_ancestors(w, steps, rng)),
        ResamplerConfig::Rejection { sup_w } => {
            let (ancestors, trips) = rejection_ancestors_counted(w, T::lit(sup_w), rng)?;
            Resampled { ancestors, weights: None, proposals: Some(trips) }
        }
        ResamplerConfig::RejectionCapped { sup_v } => {
            let (ancestors, weights, trips) = rejection_ancestors_capped_counted(w, T::lit(sup_v), rng)?;
            Resampled { ancestors, weights: Some(weights), proposals: Some(trips) }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("residual".parse::<Algorithm>().is_err());
    }

    #[test]
    fn every_config_returns_in_range_ancestors() {
        let w = WeightVector::new(vec![0.1, 0.0, 0.3, 0.2, 0.4]).unwrap();
        let rng = RngStream::new(9);
        let configs = [
            ResamplerConfig::Multinomial,
            ResamplerConfig::MultinomialSerial,
            ResamplerConfig::Stratified,
            ResamplerConfig::Systematic,
            ResamplerConfig::Metropolis { steps: 20 },
            ResamplerConfig::Rejection { sup_w: 0.4 },
            ResamplerConfig::RejectionCapped { sup_v: 0.25 },
        ];
        for c in configs {
            let r = resample_ancestors(&w, &c, &rng).unwrap();
            assert_eq!(r.ancestors.len(), 5);
            assert!(r.ancestors.iter().all(|&a| a < 5 && a != 1), "{c:?}: {:?}", r.ancestors);
            assert_eq!(c.algorithm() == Algorithm::RejectionCapped, r.weights.is_some());
        }
    }
}
