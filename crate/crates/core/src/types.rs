//! Validated vectors shared by the resamplers and the ancestry utilities.

use std::ops::Deref;

use crate::{Error, Real, Result};

/// Non-negative, finite particle weights with at least one positive entry.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T>(Vec<T>);

impl<T: Real> WeightVector<T> {
    pub fn new(w: Vec<T>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Empty);
        }
        let mut positive = false;
        for (index, &x) in w.iter().enumerate() {
            if !x.is_finite() || x < T::zero() {
                return Err(Error::InvalidWeight { index, value: x.as_f64() });
            }
            positive |= x > T::zero();
        }
        if !positive {
            return Err(Error::AllZero);
        }
        Ok(Self(w))
    }

    pub(crate) fn from_unchecked(w: Vec<T>) -> Self {
        debug_assert!(Self::new(w.clone()).is_ok());
        Self(w)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn max(&self) -> T {
        self.0.iter().copied().fold(T::zero(), T::max)
    }

    /// Multiply every weight by `c > 0`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(self.0.iter().map(|&x| x * c).collect())
    }
}

impl<T> Deref for WeightVector<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// Parent index of each offspring; every entry lies in `[0, N)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AncestryVector(Vec<usize>);

impl AncestryVector {
    pub fn new(a: Vec<usize>) -> Result<Self> {
        let len = a.len();
        if len == 0 {
            return Err(Error::Empty);
        }
        if let Some((index, &value)) = a.iter().enumerate().find(|(_, &v)| v >= len) {
            return Err(Error::AncestorOutOfRange { index, value, len });
        }
        Ok(Self(a))
    }

    pub(crate) fn from_unchecked(a: Vec<usize>) -> Self {
        debug_assert!(a.iter().all(|&v| v < a.len()), "ancestor out of range");
        Self(a)
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl Deref for AncestryVector {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// Inclusive running sum of offspring counts: non-decreasing, last entry `N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CumulativeOffspring(Vec<usize>);

impl CumulativeOffspring {
    pub fn new(o: Vec<usize>) -> Result<Self> {
        let n = o.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        if let Some(i) = o.windows(2).position(|p| p[0] > p[1]) {
            return Err(Error::InvalidCumulativeOffspring(format!(
                "decreases at position {}: {} > {}",
                i + 1,
                o[i],
                o[i + 1]
            )));
        }
        if o[n - 1] != n {
            return Err(Error::InvalidCumulativeOffspring(format!(
                "final entry is {}, expected {n}",
                o[n - 1]
            )));
        }
        Ok(Self(o))
    }

    pub(crate) fn from_unchecked(o: Vec<usize>) -> Self {
        debug_assert!(
            o.windows(2).all(|p| p[0] <= p[1]) && o.last() == Some(&o.len()),
            "invalid cumulative offspring {o:?}"
        );
        Self(o)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl Deref for CumulativeOffspring {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// Number of offspring of each parent; the counts sum to `N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OffspringVector(Vec<usize>);

impl OffspringVector {
    pub fn new(o: Vec<usize>) -> Result<Self> {
        let len = o.len();
        if len == 0 {
            return Err(Error::Empty);
        }
        let sum = o.iter().try_fold(0usize, |acc, &x| acc.checked_add(x)).unwrap_or(usize::MAX);
        if sum != len {
            return Err(Error::OffspringSum { sum, len });
        }
        Ok(Self(o))
    }

    pub(crate) fn from_unchecked(o: Vec<usize>) -> Self {
        debug_assert_eq!(o.iter().sum::<usize>(), o.len());
        Self(o)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl Deref for OffspringVector {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// An ancestry vector in which every parent that has offspring is its own
/// ancestor (`o[i] > 0` implies `c[i] == i`), so particles can be copied in
/// place without read/write conflicts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutedAncestry(AncestryVector);

impl PermutedAncestry {
    pub fn new(a: AncestryVector) -> Result<Self> {
        match predicate_violation(&a) {
            Some(index) => Err(Error::PredicateViolation { index }),
            None => Ok(Self(a)),
        }
    }

    pub(crate) fn from_unchecked(a: AncestryVector) -> Self {
        debug_assert_eq!(predicate_violation(&a), None, "in-place predicate violated");
        Self(a)
    }

    pub fn ancestry(&self) -> &AncestryVector {
        &self.0
    }

    pub fn into_ancestry(self) -> AncestryVector {
        self.0
    }
}

impl Deref for PermutedAncestry {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

/// First parent `i` that has offspring but does not sit at position `i`.
pub(crate) fn predicate_violation(a: &[usize]) -> Option<usize> {
    let n = a.len();
    let mut has_offspring = vec![false; n];
    for &v in a {
        has_offspring[v] = true;
    }
    (0..n).find(|&i| has_offspring[i] && a[i] != i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_vector_rejects_bad_input() {
        assert!(matches!(WeightVector::<f64>::new(vec![]), Err(Error::Empty)));
        assert!(matches!(WeightVector::new(vec![0.0, 0.0]), Err(Error::AllZero)));
        assert!(matches!(
            WeightVector::new(vec![1.0, -1.0]),
            Err(Error::InvalidWeight { index: 1, .. })
        ));
        assert!(matches!(
            WeightVector::new(vec![f32::NAN, 1.0]),
            Err(Error::InvalidWeight { index: 0, .. })
        ));
        assert!(WeightVector::new(vec![f64::INFINITY]).is_err());
        assert_eq!(WeightVector::new(vec![0.0, 2.0, 1.0]).unwrap().max(), 2.0);
    }

    #[test]
    fn ancestry_rejects_out_of_range() {
        assert!(AncestryVector::new(vec![0, 1, 2]).is_ok());
        assert!(matches!(
            AncestryVector::new(vec![0, 3, 2]),
            Err(Error::AncestorOutOfRange { index: 1, value: 3, len: 3 })
        ));
    }

    #[test]
    fn cumulative_offspring_validation() {
        assert!(CumulativeOffspring::new(vec![2, 2, 3, 4]).is_ok());
        assert!(CumulativeOffspring::new(vec![2, 1, 3, 4]).is_err());
        assert!(CumulativeOffspring::new(vec![1, 2, 3, 3]).is_err());
        assert!(CumulativeOffspring::new(vec![1, 2, 3, 5]).is_err());
    }

    #[test]
    fn offspring_validation() {
        assert!(OffspringVector::new(vec![2, 0, 1, 1]).is_ok());
        assert!(matches!(
            OffspringVector::new(vec![2, 0, 1, 2]),
            Err(Error::OffspringSum { sum: 5, len: 4 })
        ));
    }

    #[test]
    fn permuted_ancestry_checks_predicate() {
        let ok = AncestryVector::new(vec![0, 0, 2]).unwrap();
        assert!(PermutedAncestry::new(ok).is_ok());
        let bad = AncestryVector::new(vec![2, 0, 0]).unwrap();
        assert!(matches!(
            PermutedAncestry::new(bad),
            Err(Error::PredicateViolation { index: 0 })
        ));
    }
}
