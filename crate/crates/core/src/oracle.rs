//! Brute-force reference solvers. Ground truth for every other module,
//! so no pruning and no cleverness.

use crate::bitvec::{full_mask, BitVector};
use crate::error::{Error, Result};
use crate::instance::{Family, Instance};

/// Tuple-enumeration cap for [`count_brute`].
pub const BRUTE_BUDGET: u128 = 1 << 26;

/// Exhaustively checks whether some tuple in `A_1 x ... x A_k` has empty
/// common intersection.
pub fn decide_brute(instance: &Instance) -> bool {
    let families = instance.families();
    if families.iter().any(Family::is_empty) {
        return false;
    }
    let mask = full_mask(instance.dim());
    let mut choice = vec![0usize; families.len()];
    loop {
        let mut acc = mask;
        for (f, &i) in families.iter().zip(&choice) {
            acc &= f.members()[i].mask();
        }
        if acc == 0 {
            return true;
        }
        if !advance(&mut choice, families) {
            return false;
        }
    }
}

/// Exact number of orthogonal tuples, by full enumeration.
pub fn count_brute(instance: &Instance) -> Result<u64> {
    let families = instance.families();
    if families.iter().any(Family::is_empty) {
        return Ok(0);
    }
    let tuples: u128 = families
        .iter()
        .fold(1u128, |p, f| p.saturating_mul(f.len() as u128));
    if tuples > BRUTE_BUDGET {
        return Err(Error::EnumerationBudget {
            required: tuples,
            budget: BRUTE_BUDGET as u64,
        });
    }

    let mask = full_mask(instance.dim());
    let mut count: u64 = 0;
    let mut choice = vec![0usize; families.len()];
    loop {
        let mut acc = mask;
        for (f, &i) in families.iter().zip(&choice) {
            acc &= f.members()[i].mask();
        }
        if acc == 0 {
            count = count.checked_add(1).ok_or(Error::CountOverflow)?;
            if count > i64::MAX as u64 {
                return Err(Error::CountOverflow);
            }
        }
        if !advance(&mut choice, families) {
            return Ok(count);
        }
    }
}

/// True iff some `t`-tuple from `sets` (repetition allowed) unions to the
/// full universe `{1..dim}`.
pub fn decide_setcover_brute(dim: u32, sets: &Family, t: u32) -> bool {
    assert!(t >= 1, "t must be positive");
    assert_eq!(sets.dim(), dim, "dimension mismatch");
    if sets.is_empty() {
        return false;
    }
    let target = full_mask(dim);
    cover_rec(sets.members(), t, 0, target)
}

fn cover_rec(sets: &[BitVector], slots: u32, acc: u128, target: u128) -> bool {
    if slots == 0 {
        return acc == target;
    }
    sets.iter()
        .any(|s| cover_rec(sets, slots - 1, acc | s.mask(), target))
}

/// Odometer step over family member indices; false when exhausted.
fn advance(choice: &mut [usize], families: &[Family]) -> bool {
    for (i, f) in families.iter().enumerate().rev() {
        choice[i] += 1;
        if choice[i] < f.len() {
            return true;
        }
        choice[i] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_instance;
    use proptest::prelude::*;

    fn bv(dim: u32, coords: &[u32]) -> BitVector {
        BitVector::from_coords(dim, coords)
    }

    fn inst(dim: u32, families: Vec<Vec<BitVector>>) -> Instance {
        Instance::new(
            dim,
            families
                .into_iter()
                .map(|m| Family::new(dim, m).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn decide_single_disjoint_pair() {
        let i = inst(3, vec![vec![bv(3, &[1, 2])], vec![bv(3, &[3])]]);
        assert!(decide_brute(&i));
    }

    #[test]
    fn decide_identical_singletons() {
        let i = inst(1, vec![vec![bv(1, &[1])], vec![bv(1, &[1])]]);
        assert!(!decide_brute(&i));
    }

    #[test]
    fn decide_three_families() {
        let i = inst(
            3,
            vec![
                vec![bv(3, &[1]), bv(3, &[1, 2])],
                vec![bv(3, &[2])],
                vec![bv(3, &[3])],
            ],
        );
        assert!(decide_brute(&i));
    }

    #[test]
    fn count_three_families() {
        let i = inst(
            3,
            vec![
                vec![bv(3, &[1]), bv(3, &[1, 2])],
                vec![bv(3, &[2])],
                vec![bv(3, &[3])],
            ],
        );
        assert_eq!(count_brute(&i).unwrap(), 2);
    }

    #[test]
    fn count_single_disjoint_pair() {
        let i = inst(2, vec![vec![bv(2, &[1])], vec![bv(2, &[2])]]);
        assert_eq!(count_brute(&i).unwrap(), 1);
    }

    #[test]
    fn count_all_empty_tuple_always_orthogonal() {
        let i = inst(
            4,
            vec![
                vec![BitVector::empty(4), bv(4, &[1])],
                vec![BitVector::empty(4)],
            ],
        );
        assert!(count_brute(&i).unwrap() >= 1);
    }

    #[test]
    fn count_budget_exceeded() {
        // 64 families of 2 members: 2^64 tuples.
        let fam = vec![bv(1, &[1]), bv(1, &[1])];
        let i = inst(1, vec![fam; 64]);
        assert!(matches!(
            count_brute(&i),
            Err(Error::EnumerationBudget { .. })
        ));
    }

    #[test]
    fn setcover_two_singletons() {
        let f = Family::new(2, vec![bv(2, &[1]), bv(2, &[2])]).unwrap();
        assert!(decide_setcover_brute(2, &f, 2));
    }

    #[test]
    fn setcover_never_covered() {
        let f = Family::new(2, vec![bv(2, &[1])]).unwrap();
        assert!(!decide_setcover_brute(2, &f, 3));
    }

    #[test]
    fn setcover_overlapping_pair() {
        let f = Family::new(3, vec![bv(3, &[1, 2]), bv(3, &[2, 3])]).unwrap();
        assert!(decide_setcover_brute(3, &f, 2));
    }

    #[test]
    fn setcover_monotone_in_t() {
        let f = Family::new(4, vec![bv(4, &[1, 2]), bv(4, &[3]), bv(4, &[4])]).unwrap();
        let mut seen_true = false;
        for t in 1..=5 {
            let yes = decide_setcover_brute(4, &f, t);
            if seen_true {
                assert!(yes, "cover decision must be monotone in t");
            }
            seen_true |= yes;
        }
        assert!(seen_true);
    }

    proptest! {
        #[test]
        fn count_positive_iff_decide(seed in 0u64..500) {
            let dims = [1, 2, 4, 6];
            let d = dims[(seed % 4) as usize];
            let i = random_instance(d, &[3, 3, 2], 0.4, seed).unwrap();
            prop_assert_eq!(count_brute(&i).unwrap() > 0, decide_brute(&i));
        }

        #[test]
        fn count_invariant_under_family_permutation(seed in 0u64..200) {
            let i = random_instance(5, &[3, 2, 4], 0.5, seed).unwrap();
            let mut fams = i.families().to_vec();
            fams.rotate_left(1);
            let rotated = Instance::new(5, fams).unwrap();
            prop_assert_eq!(count_brute(&i).unwrap(), count_brute(&rotated).unwrap());
        }

        #[test]
        fn count_invariant_under_coordinate_permutation(seed in 0u64..200) {
            let d = 6u32;
            let i = random_instance(d, &[4, 4], 0.5, seed).unwrap();
            // Rotate all coordinates by one position.
            let remap = |v: &BitVector| {
                let coords: Vec<u32> =
                    v.coords().map(|c| if c == d { 1 } else { c + 1 }).collect();
                BitVector::from_coords(d, &coords)
            };
            let fams = i
                .families()
                .iter()
                .map(|f| Family::new(d, f.members().iter().map(remap).collect()).unwrap())
                .collect();
            let permuted = Instance::new(d, fams).unwrap();
            prop_assert_eq!(count_brute(&i).unwrap(), count_brute(&permuted).unwrap());
        }
    }
}
