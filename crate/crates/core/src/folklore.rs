//! Exact k-OV counting over down-closures.
//!
//! The count of orthogonal tuples equals the signed sum, over all sets x
//! in the intersection of the families' down-closures, of
//! (-1)^|x| * f_1(x) * ... * f_k(x), where f_i(x) counts the members of
//! family i containing x. Each f_i table is filled in O(d * |closure|) by
//! peeling coordinates one at a time.

use std::collections::{HashMap, HashSet};

use crate::bitvec::{submasks, BitVector};
use crate::error::{Error, Result};
use crate::instance::{Family, Instance};

/// Cap on the total number of closure entries per family.
pub const CLOSURE_BUDGET: u64 = 1 << 22;

/// Superset counts f(x) = |{a in family : x subset of a}| for every x in
/// the family's down-closure.
#[derive(Clone, Debug)]
pub struct SupersetCountTable {
    dim: u32,
    counts: HashMap<u128, u64>,
}

impl SupersetCountTable {
    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Count for `x`, or None when `x` is outside the down-closure.
    pub fn get(&self, x: &BitVector) -> Option<u64> {
        debug_assert_eq!(x.dim(), self.dim);
        self.counts.get(&x.mask()).copied()
    }

    fn get_mask(&self, mask: u128) -> Option<u64> {
        self.counts.get(&mask).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BitVector, u64)> + '_ {
        self.counts
            .iter()
            .map(|(&m, &c)| (BitVector::from_mask(m, self.dim), c))
    }
}

fn closure_cost(family: &Family) -> u128 {
    family
        .members()
        .iter()
        .map(|m| 1u128 << m.len())
        .sum()
}

fn check_budget(family: &Family) -> Result<()> {
    let required = closure_cost(family);
    if required > CLOSURE_BUDGET as u128 {
        return Err(Error::ClosureBudget {
            required,
            budget: CLOSURE_BUDGET,
        });
    }
    Ok(())
}

/// All subsets of all members, deduplicated.
pub fn down_closure(family: &Family) -> Result<HashSet<BitVector>> {
    check_budget(family)?;
    let mut out = HashSet::new();
    for m in family.members() {
        for sub in submasks(m.mask()) {
            out.insert(BitVector::from_mask(sub, family.dim()));
        }
    }
    Ok(out)
}

/// Builds the f table for one family.
///
/// Let g_j(x) count members a with x subset of a and a agreeing with x on
/// coordinates 1..=j. Then g_d is the exact-member multiplicity, g_0 = f,
/// and g_(j-1)(x) = g_j(x) + g_j(x + {j}) for j not in x (entries with j
/// in x carry over unchanged, which makes the in-place update sound).
pub fn superset_counts(family: &Family) -> Result<SupersetCountTable> {
    check_budget(family)?;
    let dim = family.dim();

    let mut counts: HashMap<u128, u64> = HashMap::new();
    for m in family.members() {
        for sub in submasks(m.mask()) {
            counts.entry(sub).or_insert(0);
        }
    }
    for m in family.members() {
        *counts.get_mut(&m.mask()).expect("member is in its own closure") += 1;
    }

    let keys: Vec<u128> = counts.keys().copied().collect();
    for j in (1..=dim).rev() {
        let bit = 1u128 << (j - 1);
        for &key in &keys {
            if key & bit == 0 {
                let above = counts.get(&(key | bit)).copied().unwrap_or(0);
                if above > 0 {
                    let slot = counts.get_mut(&key).expect("key list is stable");
                    *slot = slot
                        .checked_add(above)
                        .ok_or(Error::CountOverflow)?;
                }
            }
        }
    }

    Ok(SupersetCountTable { dim, counts })
}

/// Exact number of orthogonal tuples; matches brute-force enumeration.
pub fn count_kov(instance: &Instance) -> Result<u64> {
    let tables: Vec<SupersetCountTable> = instance
        .families()
        .iter()
        .map(superset_counts)
        .collect::<Result<_>>()?;

    // Enumerate the smallest table; keys missing from any other table
    // contribute a zero product.
    let smallest = tables
        .iter()
        .enumerate()
        .min_by_key(|(_, t)| t.len())
        .map(|(i, _)| i)
        .expect("instances have at least one family");

    let mut total: i128 = 0;
    'keys: for (x, first_count) in tables[smallest].iter() {
        let mut product: i128 = first_count as i128;
        for (i, table) in tables.iter().enumerate() {
            if i == smallest {
                continue;
            }
            match table.get_mask(x.mask()) {
                Some(c) => {
                    product = product
                        .checked_mul(c as i128)
                        .ok_or(Error::CountOverflow)?;
                }
                None => continue 'keys,
            }
        }
        if x.len() % 2 == 1 {
            product = -product;
        }
        total = total.checked_add(product).ok_or(Error::CountOverflow)?;
    }

    debug_assert!(total >= 0, "signed sum of an inclusion-exclusion count");
    if total < 0 || total > i64::MAX as i128 {
        return Err(Error::CountOverflow);
    }
    Ok(total as u64)
}

/// Decision form of [`count_kov`].
pub fn decide_kov(instance: &Instance) -> Result<bool> {
    Ok(count_kov(instance)? > 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_instance;
    use crate::oracle::count_brute;
    use proptest::prelude::*;

    fn bv(dim: u32, coords: &[u32]) -> BitVector {
        BitVector::from_coords(dim, coords)
    }

    fn fam(dim: u32, members: Vec<BitVector>) -> Family {
        Family::new(dim, members).unwrap()
    }

    fn inst(dim: u32, families: Vec<Vec<BitVector>>) -> Instance {
        Instance::new(
            dim,
            families.into_iter().map(|m| fam(dim, m)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn closure_of_a_pair() {
        let c = down_closure(&fam(2, vec![bv(2, &[1, 2])])).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn closure_of_empty_vector() {
        let c = down_closure(&fam(3, vec![BitVector::empty(3)])).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.contains(&BitVector::empty(3)));
    }

    #[test]
    fn closure_shares_empty_set() {
        let c = down_closure(&fam(2, vec![bv(2, &[1]), bv(2, &[2])])).unwrap();
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn superset_counts_by_hand() {
        let t = superset_counts(&fam(2, vec![bv(2, &[1, 2]), bv(2, &[1])])).unwrap();
        assert_eq!(t.get(&BitVector::empty(2)), Some(2));
        assert_eq!(t.get(&bv(2, &[1])), Some(2));
        assert_eq!(t.get(&bv(2, &[2])), Some(1));
        assert_eq!(t.get(&bv(2, &[1, 2])), Some(1));
    }

    #[test]
    fn superset_counts_singleton_family() {
        let s = bv(4, &[1, 3, 4]);
        let t = superset_counts(&fam(4, vec![s])).unwrap();
        assert_eq!(t.len(), 8);
        for (_, c) in t.iter() {
            assert_eq!(c, 1);
        }
    }

    #[test]
    fn superset_counts_duplicate_member() {
        let s = bv(3, &[1, 2]);
        let t = superset_counts(&fam(3, vec![s, s])).unwrap();
        assert_eq!(t.get(&s), Some(2));
        assert_eq!(t.get(&BitVector::empty(3)), Some(2));
    }

    #[test]
    fn count_two_singletons() {
        let i = inst(2, vec![vec![bv(2, &[1])], vec![bv(2, &[2])]]);
        assert_eq!(count_kov(&i).unwrap(), 1);
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
        assert_eq!(count_kov(&i).unwrap(), 2);
        assert_eq!(count_brute(&i).unwrap(), 2);
    }

    #[test]
    fn count_cancelling_pair() {
        let i = inst(1, vec![vec![bv(1, &[1])], vec![bv(1, &[1])]]);
        assert_eq!(count_kov(&i).unwrap(), 0);
    }

    #[test]
    fn decide_empty_family_is_false() {
        let i = Instance::new(
            2,
            vec![fam(2, vec![]), fam(2, vec![bv(2, &[1])])],
        )
        .unwrap();
        assert!(!decide_kov(&i).unwrap());
    }

    #[test]
    fn decide_all_families_contain_empty() {
        let i = inst(
            3,
            vec![
                vec![BitVector::empty(3), bv(3, &[1])],
                vec![BitVector::empty(3)],
            ],
        );
        assert!(decide_kov(&i).unwrap());
    }

    #[test]
    fn table_size_matches_closure_size() {
        let f = fam(5, vec![bv(5, &[1, 2, 3]), bv(5, &[3, 4]), bv(5, &[5])]);
        assert_eq!(
            superset_counts(&f).unwrap().len(),
            down_closure(&f).unwrap().len()
        );
    }

    #[test]
    fn parity_of_subset_signs_cancels() {
        let s = bv(6, &[2, 3, 5]);
        let sum: i64 = submasks(s.mask())
            .map(|m| if m.count_ones() % 2 == 0 { 1 } else { -1 })
            .sum();
        assert_eq!(sum, 0);
    }

    #[test]
    fn count_overflow_reported() {
        // Four families of 2^16 empty vectors: 2^64 orthogonal tuples.
        let members = vec![BitVector::empty(1); 1 << 16];
        let i = Instance::new(1, vec![fam(1, members); 4]).unwrap();
        assert!(matches!(count_kov(&i), Err(Error::CountOverflow)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn matches_brute_force(seed in 0u64..10_000) {
            let d = 1 + (seed % 16) as u32;
            let k = 1 + (seed / 16 % 4) as usize;
            let n = 1 + (seed / 64 % 32) as usize;
            let density = [0.2, 0.5, 0.8][(seed / 2048 % 3) as usize];
            let i = random_instance(d, &vec![n; k], density, seed).unwrap();
            prop_assert_eq!(count_kov(&i).unwrap(), count_brute(&i).unwrap());
        }

        #[test]
        fn counts_monotone_under_subset(seed in 0u64..500) {
            let i = random_instance(8, &[6], 0.5, seed).unwrap();
            let t = superset_counts(&i.families()[0]).unwrap();
            for (x, fx) in t.iter() {
                for sub in submasks(x.mask()) {
                    let fsub = t.get_mask(sub).expect("closure is downward closed");
                    prop_assert!(fsub >= fx);
                }
            }
        }
    }
}
