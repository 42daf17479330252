//! Deterministic 2-OV by meet in the middle.
//!
//! Split the universe into low bits {1..floor(d/2)} and high bits. Expand
//! each a in A to all keys (low part of a) + (any high set disjoint from
//! a), and each b in B to (any low set disjoint from b) + (high part of
//! b). A key in both expansions recombines into a disjoint pair.

use std::collections::HashMap;

use crate::bitvec::{full_mask, submasks, BitVector};
use crate::instance::Family;

#[derive(Clone, Debug)]
pub struct MitmOutcome {
    pub witness: Option<(BitVector, BitVector)>,
    /// Keys generated while expanding `A` (before deduplication); at most
    /// 2^ceil(d/2) per member.
    pub left_keys_generated: u64,
}

/// Decision plus witness; None means no orthogonal pair exists.
pub fn solve_2ov(a: &Family, b: &Family) -> Option<(BitVector, BitVector)> {
    solve_2ov_detailed(a, b).witness
}

pub fn solve_2ov_detailed(a: &Family, b: &Family) -> MitmOutcome {
    assert_eq!(a.dim(), b.dim(), "families must share a universe");
    let d = a.dim();

    if a.is_empty() || b.is_empty() {
        return MitmOutcome {
            witness: None,
            left_keys_generated: 0,
        };
    }
    if d == 0 {
        // Every vector is empty, any pair qualifies.
        return MitmOutcome {
            witness: Some((a.members()[0], b.members()[0])),
            left_keys_generated: 0,
        };
    }

    let low = full_mask(d / 2);
    let high = full_mask(d) & !low;

    // One originating member per key; first writer wins.
    let mut expanded: HashMap<u128, BitVector> = HashMap::new();
    let mut generated = 0u64;
    for &va in a.members() {
        let a_low = va.mask() & low;
        let free_high = high & !va.mask();
        for x_high in submasks(free_high) {
            generated += 1;
            expanded.entry(a_low | x_high).or_insert(va);
        }
    }

    for &vb in b.members() {
        let b_high = vb.mask() & high;
        let free_low = low & !vb.mask();
        for x_low in submasks(free_low) {
            if let Some(&va) = expanded.get(&(x_low | b_high)) {
                debug_assert!(va.is_disjoint(&vb));
                if va.is_disjoint(&vb) {
                    return MitmOutcome {
                        witness: Some((va, vb)),
                        left_keys_generated: generated,
                    };
                }
            }
        }
    }

    MitmOutcome {
        witness: None,
        left_keys_generated: generated,
    }
}
