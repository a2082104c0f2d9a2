//! Data-parallel resampling for particle filters.
//!
//! The crate provides the multinomial, stratified, systematic, Metropolis
//! and rejection resamplers, conversions among ancestry, offspring and
//! cumulative-offspring vectors, and the permutations that let particles be
//! copied in place after resampling. Around those sit the diagnostics used
//! to study the resamplers (effective sample size, offspring error, a
//! synthetic Gaussian weight generator with closed-form moments), a
//! benchmark harness, and a bootstrap particle filter on a linear-Gaussian
//! model that can be checked against the exact Kalman recursion.
//!
//! Every random draw comes from a counter-addressed substream of a master
//! seed (see [`rng::RngStream`]), so results never depend on how the
//! per-element loops are scheduled across threads.

pub mod ancestry;
pub mod bench;
pub mod diagnostics;
mod error;
pub mod pf;
pub mod primitives;
mod real;
pub mod resamplers;
pub mod rng;
mod types;

pub use error::{Error, Result};
pub use real::{Precision, Real};
pub use types::{AncestryVector, CumulativeOffspring, OffspringVector, PermutedAncestry, WeightVector};
