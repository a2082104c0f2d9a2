//! Conversions among ancestry, offspring and cumulative-offspring vectors,
//! and permutation of ancestry vectors into in-place form.
//!
//! An ancestry vector `c` is in in-place form when every parent that has
//! offspring is its own ancestor: `o[i] > 0` implies `c[i] == i`. Copying
//! `x[i] <- x[c[i]]` for all `c[i] != i` then never reads a slot that is
//! also written.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::primitives::{adjacent_difference, inclusive_prefix_sum, map_indices, PAR_MIN};
use crate::{AncestryVector, CumulativeOffspring, OffspringVector, PermutedAncestry};

/// Parent `i` fills output slots `O[i - 1] .. O[i]`. The result is sorted.
pub fn cumulative_offspring_to_ancestors(o: &CumulativeOffspring) -> AncestryVector {
    let n = o.len();
    let mut a = vec![0; n];
    // disjoint output block per parent
    let mut blocks = Vec::with_capacity(n);
    let mut rest = a.as_mut_slice();
    let mut start = 0;
    for (i, &end) in o.iter().enumerate() {
        let (block, tail) = rest.split_at_mut(end - start);
        blocks.push((i, block));
        rest = tail;
        start = end;
    }
    let fill = |(i, block): (usize, &mut [usize])| block.fill(i);
    if n < PAR_MIN {
        blocks.into_iter().for_each(fill);
    } else {
        blocks.into_par_iter().for_each(fill);
    }
    AncestryVector::from_unchecked(a)
}

/// Offspring histogram of an ancestry vector, by atomic increments.
pub fn ancestors_to_offspring(a: &AncestryVector) -> OffspringVector {
    let n = a.len();
    if n < PAR_MIN {
        let mut o = vec![0; n];
        for &p in a.iter() {
            o[p] += 1;
        }
        return OffspringVector::from_unchecked(o);
    }
    let o: Vec<AtomicUsize> = (0..n).map(|_| AtomicUsize::new(0)).collect();
    a.par_iter().for_each(|&p| {
        o[p].fetch_add(1, Ordering::Relaxed);
    });
    OffspringVector::from_unchecked(o.into_iter().map(AtomicUsize::into_inner).collect())
}

pub fn offspring_to_cumulative(o: &OffspringVector) -> CumulativeOffspring {
    CumulativeOffspring::from_unchecked(inclusive_prefix_sum(o))
}

pub fn cumulative_to_offspring(o: &CumulativeOffspring) -> OffspringVector {
    OffspringVector::from_unchecked(adjacent_difference(o))
}

/// Serial in-place-form permutation by pairwise swaps.
///
/// Whenever `a[i]` is not `i` and parent `a[i]` does not yet sit at its own
/// slot, the two entries are swapped and position `i` is examined again.
/// Each swap settles one parent permanently, so the pass is `O(N)`.
pub fn permute_serial(a: &AncestryVector) -> PermutedAncestry {
    let mut c = a.as_slice().to_vec();
    let mut i = 0;
    while i < c.len() {
        let p = c[i];
        if p != i && c[p] != p {
            c.swap(i, p);
        } else {
            i += 1;
        }
    }
    PermutedAncestry::from_unchecked(AncestryVector::from_unchecked(c))
}

/// Claim vector: `d[v]` is the lowest position whose ancestor is `v`, or
/// the sentinel `N` when `v` has no offspring.
pub fn prepermute(a: &AncestryVector) -> Vec<usize> {
    claims(a).into_iter().map(AtomicUsize::into_inner).collect()
}

fn claims(a: &AncestryVector) -> Vec<AtomicUsize> {
    let n = a.len();
    let d: Vec<AtomicUsize> = (0..n).map(|_| AtomicUsize::new(n)).collect();
    let claim = |(i, &p): (usize, &usize)| {
        d[p].fetch_min(i, Ordering::Relaxed);
    };
    if n < PAR_MIN {
        a.iter().enumerate().for_each(claim);
    } else {
        a.par_iter().enumerate().for_each(claim);
    }
    d
}

/// Parallel in-place-form permutation.
///
/// After [`prepermute`], every position that lost its claim walks
/// `i -> d[i] -> d[d[i]] -> ...` until it reaches a slot still holding the
/// sentinel, and claims that slot. The non-sentinel values of `d` are
/// distinct, so no walk revisits a slot; the losers are exactly the
/// positions absent from `d`, so each heads its own chain and the walks
/// end at distinct free slots. The output is `c[i] = a[d[i]]`.
pub fn permute_parallel(a: &AncestryVector) -> PermutedAncestry {
    permute_parallel_instrumented(a).0
}

/// As [`permute_parallel`], also returning the longest chain walk (slots
/// visited by one position, including its final claim).
pub fn permute_parallel_instrumented(a: &AncestryVector) -> (PermutedAncestry, usize) {
    let n = a.len();
    let d = claims(a);
    let walk = |i: usize| -> usize {
        if d[a[i]].load(Ordering::Relaxed) == i {
            return 0;
        }
        let mut x = i;
        let mut steps = 0;
        loop {
            loop {
                steps += 1;
                let next = d[x].load(Ordering::Acquire);
                if next >= n {
                    break;
                }
                x = next;
            }
            match d[x].compare_exchange(n, i, Ordering::AcqRel, Ordering::Acquire) {
                Ok(_) => return steps,
                // taken since we looked: follow it onward
                Err(taken) => x = taken,
            }
        }
    };
    let longest = map_indices(n, walk).into_iter().max().unwrap_or(0);
    let c = map_indices(n, |i| a[d[i].load(Ordering::Relaxed)]);
    let c = PermutedAncestry::from_unchecked(AncestryVector::from_unchecked(c));
    (c, longest)
}

/// Whether every parent with offspring is its own ancestor.
pub fn satisfies_in_place_predicate(a: &[usize]) -> bool {
    crate::types::predicate_violation(a).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn anc(v: &[usize]) -> AncestryVector {
        AncestryVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn cumulative_to_ancestors_examples() {
        let o = |v: &[usize]| CumulativeOffspring::new(v.to_vec()).unwrap();
        assert_eq!(cumulative_offspring_to_ancestors(&o(&[2, 2, 3, 4])).as_slice(), &[0, 0, 2, 3]);
        assert_eq!(cumulative_offspring_to_ancestors(&o(&[1, 2, 3, 4])).as_slice(), &[0, 1, 2, 3]);
        assert_eq!(cumulative_offspring_to_ancestors(&o(&[4, 4, 4, 4])).as_slice(), &[0, 0, 0, 0]);
    }

    #[test]
    fn offspring_examples() {
        assert_eq!(ancestors_to_offspring(&anc(&[0, 0, 2, 3])).as_slice(), &[2, 0, 1, 1]);
        assert_eq!(ancestors_to_offspring(&anc(&[0, 1, 2, 3])).as_slice(), &[1, 1, 1, 1]);
        let o = OffspringVector::new(vec![2, 0, 1, 1]).unwrap();
        assert_eq!(offspring_to_cumulative(&o).as_slice(), &[2, 2, 3, 4]);
        let o = OffspringVector::new(vec![0, 0, 0, 4]).unwrap();
        assert_eq!(offspring_to_cumulative(&o).as_slice(), &[0, 0, 0, 4]);
        let c = |v: &[usize]| CumulativeOffspring::new(v.to_vec()).unwrap();
        assert_eq!(cumulative_to_offspring(&c(&[2, 2, 3, 4])).as_slice(), &[2, 0, 1, 1]);
        assert_eq!(cumulative_to_offspring(&c(&[1, 2, 3, 4])).as_slice(), &[1, 1, 1, 1]);
        assert_eq!(cumulative_to_offspring(&c(&[4, 4, 4, 4])).as_slice(), &[4, 0, 0, 0]);
    }

    #[test]
    fn serial_permute_examples() {
        assert_eq!(permute_serial(&anc(&[2, 0, 0])).ancestry().as_slice(), &[0, 0, 2]);
        assert_eq!(permute_serial(&anc(&[0, 1, 2, 3])).ancestry().as_slice(), &[0, 1, 2, 3]);
        assert_eq!(permute_serial(&anc(&[1, 1, 1, 1])).ancestry().as_slice(), &[1, 1, 1, 1]);
    }

    #[test]
    fn prepermute_examples() {
        assert_eq!(prepermute(&anc(&[2, 0, 0])), vec![1, 3, 0]);
        assert_eq!(prepermute(&anc(&[0, 1, 2, 3])), vec![0, 1, 2, 3]);
        assert_eq!(prepermute(&anc(&[0, 0, 0, 0])), vec![0, 4, 4, 4]);
    }

    #[test]
    fn parallel_permute_examples() {
        assert_eq!(permute_parallel(&anc(&[2, 0, 0])).ancestry().as_slice(), &[0, 0, 2]);
        assert_eq!(permute_parallel(&anc(&[0, 1, 2, 3])).ancestry().as_slice(), &[0, 1, 2, 3]);
    }

    #[test]
    fn large_inputs_take_the_parallel_paths() {
        let n = 3 * PAR_MIN + 5;
        let a = anc(&(0..n).map(|i| (i * i + 7) % n / 3).collect::<Vec<_>>());
        let o = ancestors_to_offspring(&a);
        assert_eq!(o.iter().sum::<usize>(), n);
        let back = cumulative_offspring_to_ancestors(&offspring_to_cumulative(&o));
        let mut sorted = a.as_slice().to_vec();
        sorted.sort_unstable();
        assert_eq!(back.as_slice(), sorted.as_slice());
        let (c, longest) = permute_parallel_instrumented(&a);
        assert!(satisfies_in_place_predicate(&c));
        assert!(longest <= n);
    }

    fn ancestry_strategy() -> impl Strategy<Value = AncestryVector> {
        (1usize..300).prop_flat_map(|n| {
            // bias toward few distinct parents so claims are contested
            (Just(n), 1usize..=n).prop_flat_map(|(n, k)| {
                prop::collection::vec(0..k, n).prop_map(move |v| {
                    AncestryVector::new(v.into_iter().map(|x| (x * 7919) % n).collect()).unwrap()
                })
            })
        })
    }

    fn sorted(v: &[usize]) -> Vec<usize> {
        let mut v = v.to_vec();
        v.sort_unstable();
        v
    }

    proptest! {
        #[test]
        fn permutes_satisfy_predicate_and_preserve_multiset(a in ancestry_strategy()) {
            let s = permute_serial(&a);
            let (p, longest) = permute_parallel_instrumented(&a);
            prop_assert!(satisfies_in_place_predicate(&s));
            prop_assert!(satisfies_in_place_predicate(&p));
            prop_assert_eq!(sorted(&s), sorted(&a));
            prop_assert_eq!(sorted(&p), sorted(&a));
            prop_assert!(longest <= a.len());
        }

        #[test]
        fn prepermute_claims_lowest_index(a in ancestry_strategy()) {
            let d = prepermute(&a);
            let n = a.len();
            for (v, &claim) in d.iter().enumerate() {
                let expect = a.iter().position(|&x| x == v).unwrap_or(n);
                prop_assert_eq!(claim, expect);
            }
        }

        #[test]
        fn conversions_round_trip(a in ancestry_strategy()) {
            let o = ancestors_to_offspring(&a);
            let cum = offspring_to_cumulative(&o);
            prop_assert_eq!(cumulative_to_offspring(&cum), o.clone());
            let back = cumulative_offspring_to_ancestors(&cum);
            prop_assert!(back.windows(2).all(|p| p[0] <= p[1]));
            prop_assert_eq!(ancestors_to_offspring(&back), o);
        }
    }
}
