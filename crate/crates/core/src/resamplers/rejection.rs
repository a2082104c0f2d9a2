use rand::Rng;

use crate::rng::RngStream;
use crate::{AncestryVector, Error, Real, Result, WeightVector};

fn check_bound<T: Real>(sup: T) -> Result<()> {
    if sup.is_finite() && sup > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("weight bound must be finite and positive, got {sup}")))
    }
}

/// Rejection loop for every element. `weight(j)` is the proposal weight
/// of particle `j`; returns the ancestors and the total proposal count.
fn rejection_loop<T, F>(n: usize, sup: T, weight: F, rng: &RngStream) -> Result<(AncestryVector, u64)>
where
    T: Real,
    F: Fn(usize) -> T + Sync + Send,
{
    let draws: Result<Vec<(usize, u64)>> = crate::primitives::map_indices(n, |i| {
        let mut rng = rng.substream(i as u64, 0);
        // first proposal is the particle itself
        let mut j = i;
        let mut trips = 1u64;
        loop {
            let ratio = weight(j) / sup;
            if !ratio.is_finite() {
                return Err(Error::NonFiniteRatio { index: j, ratio: ratio.as_f64() });
            }
            // (0, 1] draw: a zero-weight proposal is never accepted
            if T::uniform_open_closed(&mut rng) <= ratio {
                return Ok((j, trips));
            }
            j = rng.random_range(0..n);
            trips += 1;
        }
    })
    .into_iter()
    .collect();
    let draws = draws?;
    let trips = draws.iter().map(|&(_, t)| t).sum();
    Ok((AncestryVector::from_unchecked(draws.into_iter().map(|(j, _)| j).collect()), trips))
}

/// Rejection resampling against the weight bound `sup_w`.
///
/// Each element first proposes itself, then uniformly random particles,
/// accepting `j` with probability `w[j] / sup_w`. The output is unweighted:
/// the caller should reset every weight to one. A `sup_w` below the true
/// maximum is tolerated (ratios above one always accept) at the cost of
/// bias.
pub fn rejection_ancestors<T: Real>(w: &WeightVector<T>, sup_w: T, rng: &RngStream) -> Result<AncestryVector> {
    rejection_ancestors_counted(w, sup_w, rng).map(|(a, _)| a)
}

/// As [`rejection_ancestors`], also returning the total number of proposals.
pub fn rejection_ancestors_counted<T: Real>(
    w: &WeightVector<T>,
    sup_w: T,
    rng: &RngStream,
) -> Result<(AncestryVector, u64)> {
    check_bound(sup_w)?;
    rejection_loop(w.len(), sup_w, |j| w[j], rng)
}

/// Rejection resampling from the capped weights `v[i] = min(w[i], sup_v)`,
/// followed by importance weighting.
///
/// Returns the ancestors and the offspring weights `w[a[i]] / v[a[i]]`,
/// which equal one except where the parent's weight exceeded `sup_v`.
pub fn rejection_ancestors_capped<T: Real>(
    w: &WeightVector<T>,
    sup_v: T,
    rng: &RngStream,
) -> Result<(AncestryVector, WeightVector<T>)> {
    rejection_ancestors_capped_counted(w, sup_v, rng).map(|(a, v, _)| (a, v))
}

pub fn rejection_ancestors_capped_counted<T: Real>(
    w: &WeightVector<T>,
    sup_v: T,
    rng: &RngStream,
) -> Result<(AncestryVector, WeightVector<T>, u64)> {
    check_bound(sup_v)?;
    let capped = |j: usize| w[j].min(sup_v);
    let (a, trips) = rejection_loop(w.len(), sup_v, capped, rng)?;
    let weights = a.iter().map(|&j| w[j] / capped(j)).collect();
    Ok((a, WeightVector::from_unchecked(weights), trips))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_weights_keep_every_particle() {
        let w = WeightVector::new(vec![0.7; 9]).unwrap();
        let a = rejection_ancestors(&w, 0.7, &RngStream::new(4)).unwrap();
        assert_eq!(a, AncestryVector::identity(9));
    }

    #[test]
    fn single_support_point() {
        let w = WeightVector::new(vec![0.0, 0.0, 5.0, 0.0]).unwrap();
        for seed in 0..20 {
            let a = rejection_ancestors(&w, 5.0, &RngStream::new(seed)).unwrap();
            assert_eq!(a.as_slice(), &[2, 2, 2, 2]);
        }
    }

    #[test]
    fn inactive_cap_matches_plain_rejection() {
        let w = WeightVector::new(vec![0.1, 0.4, 0.2, 0.3, 0.0, 0.25]).unwrap();
        let rng = RngStream::new(12);
        let plain = rejection_ancestors(&w, 0.4, &rng).unwrap();
        let (a, v) = rejection_ancestors_capped(&w, 0.4, &rng).unwrap();
        assert_eq!(plain, a);
        assert!(v.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn capped_weight_ratio() {
        let w = WeightVector::new(vec![4.0, 1.0, 1.0]).unwrap();
        let mut seen = false;
        for seed in 0..50 {
            let (a, v) = rejection_ancestors_capped(&w, 2.0, &RngStream::new(seed)).unwrap();
            for (i, &p) in a.iter().enumerate() {
                assert_eq!(v[i], if p == 0 { 2.0 } else { 1.0 });
                seen |= p == 0;
            }
        }
        assert!(seen);
    }

    #[test]
    fn invalid_bound_is_rejected() {
        let w = WeightVector::new(vec![1.0, 2.0]).unwrap();
        let rng = RngStream::new(0);
        assert!(rejection_ancestors(&w, 0.0, &rng).is_err());
        assert!(rejection_ancestors(&w, f64::NAN, &rng).is_err());
        assert!(rejection_ancestors_capped(&w, -1.0, &rng).is_err());
    }

    #[test]
    fn underestimated_bound_is_tolerated() {
        let w = WeightVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(rejection_ancestors(&w, 1.5, &RngStream::new(1)).is_ok());
    }

    #[test]
    fn overflowing_ratio_is_an_error() {
        let w = WeightVector::new(vec![1e300, 1e300]).unwrap();
        let err = rejection_ancestors(&w, 1e-300, &RngStream::new(1)).unwrap_err();
        assert!(matches!(err, Error::NonFiniteRatio { .. }));
    }

    #[test]
    fn power_of_two_scaling_is_bit_identical() {
        let w = WeightVector::new(vec![0.3f64, 0.0, 1.7, 0.25, 0.9]).unwrap();
        let s = w.scaled(0.5).unwrap();
        let rng = RngStream::new(8);
        assert_eq!(rejection_ancestors(&w, 2.0, &rng).unwrap(), rejection_ancestors(&s, 1.0, &rng).unwrap());
    }
}
