//! Bootstrap particle filter on a scalar linear-Gaussian model, plus the
//! exact Kalman recursion for the same model.
//!
//! The model is
//!
//! ```text
//! x[1]   ~ N(initial_mean, initial_std^2)
//! x[t+1] = coefficient * x[t] + N(0, transition_std^2)
//! y[t]   = x[t] + N(0, observation_std^2)
//! ```
//!
//! The filter keeps log-weights. At the start of every step after the
//! first it resamples if the effective sample size has fallen below
//! `ess_threshold * N`, copies particles in place through a permuted
//! ancestry vector, propagates, and reweights.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::ancestry::permute_parallel;
use crate::diagnostics::{ess, logweights_to_weights};
use crate::primitives::{map_indices, stable_sum};
use crate::resamplers::{metropolis_num_steps, resample_ancestors, Algorithm, ResamplerConfig};
use crate::rng::RngStream;
use crate::{Error, PermutedAncestry, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearGaussianModel {
    pub coefficient: f64,
    pub transition_std: f64,
    pub observation_std: f64,
    pub initial_mean: f64,
    pub initial_std: f64,
}

impl Default for LinearGaussianModel {
    /// Independent standard normal states observed with unit noise.
    fn default() -> Self {
        Self { coefficient: 0.0, transition_std: 1.0, observation_std: 1.0, initial_mean: 0.0, initial_std: 1.0 }
    }
}

impl LinearGaussianModel {
    pub fn validate(&self) -> Result<()> {
        let stds = [
            ("transition", self.transition_std),
            ("observation", self.observation_std),
            ("initial", self.initial_std),
        ];
        for (name, s) in stds {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} std must be positive, got {s}")));
            }
        }
        if !self.coefficient.is_finite() || !self.initial_mean.is_finite() {
            return Err(Error::InvalidParameter("model parameters must be finite".into()));
        }
        Ok(())
    }

    /// Draw `steps` latent states and their observations.
    pub fn simulate(&self, steps: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = RngStream::new(seed).substream(0, 0);
        let mut z = || -> f64 { StandardNormal.sample(&mut rng) };
        let mut xs = Vec::with_capacity(steps);
        let mut ys = Vec::with_capacity(steps);
        let mut x = self.initial_mean + self.initial_std * z();
        for t in 0..steps {
            if t > 0 {
                x = self.coefficient * x + self.transition_std * z();
            }
            xs.push(x);
            ys.push(x + self.observation_std * z());
        }
        (xs, ys)
    }

    fn log_likelihood(&self, y: f64, x: f64) -> f64 {
        let d = (y - x) / self.observation_std;
        -0.5 * (d * d + LN_2PI) - self.observation_std.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterOptions {
    pub particles: usize,
    pub resampler: Algorithm,
    /// Resample when `ess < ess_threshold * N`; 0 never resamples and 1
    /// always does.
    pub ess_threshold: f64,
    pub seed: u64,
    /// Metropolis bias tolerance as a fraction of the realised `p*`.
    pub epsilon_factor: f64,
    /// Capped rejection caps weights at this fraction of the largest.
    pub cap_fraction: f64,
}

impl FilterOptions {
    pub fn new(particles: usize, resampler: Algorithm, seed: u64) -> Self {
        Self { particles, resampler, ess_threshold: 0.5, seed, epsilon_factor: 1e-2, cap_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    /// Filtered mean of `x[t]` given `y[1..=t]`.
    pub means: Vec<f64>,
    /// ESS after weighting at each step.
    pub ess: Vec<f64>,
    /// Whether the particles were resampled at the start of each step.
    pub resampled: Vec<bool>,
    pub log_likelihood: f64,
}

/// `particles[i] = particles[a[i]]` wherever `a[i] != i`.
///
/// Because `a` satisfies the in-place predicate, every slot read is a slot
/// that keeps its own particle, so a single buffer suffices.
pub fn pf_copy_step<P: Clone>(particles: &mut [P], a: &PermutedAncestry) {
    assert_eq!(particles.len(), a.ancestry().len(), "particle and ancestry lengths differ");
    debug_assert!(crate::ancestry::satisfies_in_place_predicate(a.ancestry()));
    for (i, &p) in a.ancestry().iter().enumerate() {
        if p != i {
            particles[i] = particles[p].clone();
        }
    }
}

fn log_sum_exp(lw: &[f64]) -> f64 {
    let max = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let terms: Vec<f64> = lw.iter().map(|&l| (l - max).exp()).collect();
    max + stable_sum(&terms).ln()
}

/// The resampler parameters for the current weights, which have already
/// been scaled so the largest is one.
fn step_resampler(options: &FilterOptions, total: f64, n: usize) -> ResamplerConfig {
    match options.resampler {
        Algorithm::Multinomial => ResamplerConfig::Multinomial,
        Algorithm::MultinomialSerial => ResamplerConfig::MultinomialSerial,
        Algorithm::Stratified => ResamplerConfig::Stratified,
        Algorithm::Systematic => ResamplerConfig::Systematic,
        Algorithm::Metropolis => {
            let p_star = 1.0 / total;
            // equal weights mix in one step
            let steps = metropolis_num_steps(p_star, p_star * options.epsilon_factor, n).unwrap_or(1);
            ResamplerConfig::Metropolis { steps }
        }
        Algorithm::Rejection => ResamplerConfig::Rejection { sup_w: 1.0 },
        Algorithm::RejectionCapped => ResamplerConfig::RejectionCapped { sup_v: options.cap_fraction },
    }
}

pub fn pf_run(model: &LinearGaussianModel, observations: &[f64], options: &FilterOptions) -> Result<FilterOutput> {
    model.validate()?;
    let n = options.particles;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need at least two particles, got {n}")));
    }
    if observations.is_empty() {
        return Err(Error::Empty);
    }
    if !(0.0..=1.0).contains(&options.ess_threshold) {
        return Err(Error::InvalidParameter(format!("ESS threshold must lie in [0, 1], got {}", options.ess_threshold)));
    }
    if !(options.epsilon_factor > 0.0 && options.epsilon_factor < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon factor must lie in (0, 1), got {}", options.epsilon_factor)));
    }
    if !(options.cap_fraction > 0.0 && options.cap_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("cap fraction must lie in (0, 1], got {}", options.cap_fraction)));
    }

    let master = RngStream::new(options.seed);
    let init = master.derive(0);
    let mut x = map_indices(n, |i| {
        let z: f64 = StandardNormal.sample(&mut init.substream(i as u64, 0));
        model.initial_mean + model.initial_std * z
    });
    let mut lw = vec![0.0; n];
    let mut out = FilterOutput {
        means: Vec::with_capacity(observations.len()),
        ess: Vec::with_capacity(observations.len()),
        resampled: Vec::with_capacity(observations.len()),
        log_likelihood: 0.0,
    };

    for (t, &y) in observations.iter().enumerate() {
        let step = master.derive(t as u64 + 1);
        let mut resampled = false;
        if t > 0 {
            let w = logweights_to_weights(&lw)?;
            if options.ess_threshold >= 1.0 || ess(&w) < options.ess_threshold * n as f64 {
                let config = step_resampler(options, stable_sum(&w), n);
                let r = resample_ancestors(&w, &config, &step.derive(0))?;
                let permuted = permute_parallel(&r.ancestors);
                pf_copy_step(&mut x, &permuted);
                lw = match r.weights {
                    // offspring weights follow the ancestry, so reorder them too
                    Some(v) => {
                        let mut v = v.into_inner();
                        pf_copy_step(&mut v, &permuted);
                        v.into_iter().map(f64::ln).collect()
                    }
                    None => vec![0.0; n],
                };
                resampled = true;
            }
            let (c, s) = (model.coefficient, model.transition_std);
            x.par_iter_mut().enumerate().with_min_len(1024).for_each(|(i, xi)| {
                let z: f64 = step.substream(i as u64, 0).sample(StandardNormal);
                *xi = c * *xi + s * z;
            });
        }

        let before = log_sum_exp(&lw);
        lw.par_iter_mut().zip(&x).with_min_len(1024).for_each(|(l, &xi)| *l += model.log_likelihood(y, xi));
        let after = log_sum_exp(&lw);
        if after == f64::NEG_INFINITY {
            return Err(Error::WeightCollapse { step: t });
        }
        out.log_likelihood += after - before;

        let w = logweights_to_weights(&lw)?;
        let total = stable_sum(&w);
        let weighted: Vec<f64> = w.iter().zip(&x).map(|(&wi, &xi)| wi * xi).collect();
        out.means.push(stable_sum(&weighted) / total);
        out.ess.push(ess(&w));
        out.resampled.push(resampled);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KalmanOutput {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
    pub log_likelihood: f64,
}

/// Exact filtering distributions and marginal likelihood.
pub fn kalman_filter(model: &LinearGaussianModel, observations: &[f64]) -> Result<KalmanOutput> {
    model.validate()?;
    let r2 = model.observation_std * model.observation_std;
    let (mut m, mut p) = (model.initial_mean, model.initial_std * model.initial_std);
    let mut out = KalmanOutput { means: Vec::new(), variances: Vec::new(), log_likelihood: 0.0 };
    for (t, &y) in observations.iter().enumerate() {
        if t > 0 {
            m *= model.coefficient;
            p = model.coefficient * model.coefficient * p + model.transition_std * model.transition_std;
        }
        let s = p + r2;
        let e = y - m;
        out.log_likelihood += -0.5 * (LN_2PI + s.ln() + e * e / s);
        let k = p / s;
        m += k * e;
        p *= 1.0 - k;
        out.means.push(m);
        out.variances.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ancestry::permute_serial;
    use crate::AncestryVector;

    #[test]
    fn copy_step_examples() {
        let mut p = vec!['p', 'q', 'r'];
        pf_copy_step(&mut p, &permute_serial(&AncestryVector::identity(3)));
        assert_eq!(p, ['p', 'q', 'r']);
        pf_copy_step(&mut p, &PermutedAncestry::new(AncestryVector::new(vec![0, 0, 2]).unwrap()).unwrap());
        assert_eq!(p, ['p', 'p', 'r']);
    }

    #[test]
    fn copy_step_matches_two_buffer_gather() {
        let rng = RngStream::new(8);
        let mut r = rng.substream(0, 0);
        for _ in 0..20 {
            let a: Vec<usize> = (0..1024).map(|_| r.random_range(0..1024usize).min(r.random_range(0..1024))).collect();
            let c = permute_parallel(&AncestryVector::new(a).unwrap());
            let old: Vec<u32> = (0..1024).map(|_| r.random()).collect();
            let gathered: Vec<u32> = c.ancestry().iter().map(|&j| old[j]).collect();
            let mut inplace = old.clone();
            pf_copy_step(&mut inplace, &c);
            assert_eq!(inplace, gathered);
        }
    }

    #[test]
    fn kalman_with_independent_states() {
        let k = kalman_filter(&LinearGaussianModel::default(), &[2.0, -1.0]).unwrap();
        assert_eq!(k.means, vec![1.0, -0.5]);
        assert_eq!(k.variances, vec![0.5, 0.5]);
        let expect = -(LN_2PI + 2f64.ln()) - (4.0 + 1.0) / 4.0;
        assert!((k.log_likelihood - expect).abs() < 1e-12);
    }

    #[test]
    fn uninformative_observations_never_trigger_resampling() {
        let model = LinearGaussianModel { coefficient: 0.9, observation_std: 1e6, ..Default::default() };
        let (_, ys) = model.simulate(20, 3);
        let out = pf_run(&model, &ys, &FilterOptions::new(2000, Algorithm::Systematic, 1)).unwrap();
        assert!(out.resampled.iter().all(|&r| !r));
        assert!(out.ess.iter().all(|&e| e > 0.999 * 2000.0));
        // prior dynamics: the mean decays toward zero from zero
        assert!(out.means.iter().all(|m| m.abs() < 0.2));
    }

    #[test]
    fn posterior_mean_shrinks_toward_observation() {
        let model = LinearGaussianModel {
            coefficient: 1.0,
            transition_std: 1e-3,
            initial_mean: 0.0,
            initial_std: 1.0,
            observation_std: 1.0,
        };
        for alg in Algorithm::ALL {
            let out = pf_run(&model, &[3.0], &FilterOptions::new(5000, alg, 2)).unwrap();
            assert!(out.means[0] > 0.0 && out.means[0] < 3.0, "{alg}");
        }
    }

    #[test]
    fn tracks_the_kalman_filter() {
        let model = LinearGaussianModel { coefficient: 0.8, ..Default::default() };
        let (_, ys) = model.simulate(30, 11);
        let exact = kalman_filter(&model, &ys).unwrap();
        for alg in Algorithm::ALL {
            let out = pf_run(&model, &ys, &FilterOptions::new(4096, alg, 5)).unwrap();
            for (m, e) in out.means.iter().zip(&exact.means) {
                assert!((m - e).abs() < 0.1, "{alg}: {m} vs {e}");
            }
            assert!((out.log_likelihood - exact.log_likelihood).abs() < 0.5, "{alg}");
        }
    }

    #[test]
    fn threshold_extremes() {
        let model = LinearGaussianModel::default();
        let (_, ys) = model.simulate(10, 1);
        let mut o = FilterOptions::new(256, Algorithm::Multinomial, 3);
        o.ess_threshold = 0.0;
        assert!(pf_run(&model, &ys, &o).unwrap().resampled.iter().all(|&r| !r));
        o.ess_threshold = 1.0;
        let r = pf_run(&model, &ys, &o).unwrap().resampled;
        assert!(!r[0] && r[1..].iter().all(|&r| r));
    }

    #[test]
    fn reproducible() {
        let model = LinearGaussianModel::default();
        let (_, ys) = model.simulate(10, 1);
        let o = FilterOptions::new(3000, Algorithm::Metropolis, 3);
        assert_eq!(pf_run(&model, &ys, &o).unwrap(), pf_run(&model, &ys, &o).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let model = LinearGaussianModel::default();
        assert!(pf_run(&model, &[], &FilterOptions::new(10, Algorithm::Systematic, 0)).is_err());
        assert!(pf_run(&model, &[0.0], &FilterOptions::new(1, Algorithm::Systematic, 0)).is_err());
        let mut o = FilterOptions::new(10, Algorithm::Systematic, 0);
        o.ess_threshold = 1.5;
        assert!(pf_run(&model, &[0.0], &o).is_err());
        let bad = LinearGaussianModel { observation_std: 0.0, ..Default::default() };
        assert!(pf_run(&bad, &[0.0], &FilterOptions::new(10, Algorithm::Systematic, 0)).is_err());
    }
}
