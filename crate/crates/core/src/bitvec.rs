//! Bit-vectors over a universe of at most 128 coordinates.
//!
//! A vector is a subset of `{1..d}` packed into a `u128` mask: coordinate
//! `j` lives in bit `j - 1`, so the leftmost character of the text form is
//! the lowest bit. Intersection, subset and disjointness tests are single
//! word operations, which dominate every solver's inner loop.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported dimension; a vector fits two machine words.
pub const MAX_DIM: u32 = 128;

/// A subset of coordinates `{1..dim}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    bits: u128,
    dim: u32,
}

/// Mask with the `dim` lowest bits set.
pub(crate) fn full_mask(dim: u32) -> u128 {
    debug_assert!(dim <= MAX_DIM);
    if dim == 0 {
        0
    } else {
        u128::MAX >> (MAX_DIM - dim)
    }
}

impl BitVector {
    /// The empty set over `{1..dim}`.
    pub fn empty(dim: u32) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        BitVector { bits: 0, dim }
    }

    /// The full set `{1..dim}`.
    pub fn full(dim: u32) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        BitVector {
            bits: full_mask(dim),
            dim,
        }
    }

    /// Builds a vector from 1-indexed coordinates. Panics on out-of-range
    /// coordinates; intended for literals in tests and constructions.
    pub fn from_coords(dim: u32, coords: &[u32]) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        let mut bits = 0u128;
        for &c in coords {
            assert!(
                c >= 1 && c <= dim,
                "coordinate {c} outside 1..={dim}"
            );
            bits |= 1u128 << (c - 1);
        }
        BitVector { bits, dim }
    }

    /// Wraps a raw mask already known to fit within `dim`.
    pub fn from_mask(bits: u128, dim: u32) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        assert!(
            bits & !full_mask(dim) == 0,
            "mask has bits outside dimension {dim}"
        );
        BitVector { bits, dim }
    }

    pub fn mask(&self) -> u128 {
        self.bits
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Number of coordinates present.
    pub fn len(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    /// Membership of the 1-indexed coordinate `c`.
    pub fn contains(&self, c: u32) -> bool {
        c >= 1 && c <= self.dim && self.bits & (1u128 << (c - 1)) != 0
    }

    pub fn is_disjoint(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.bits & other.bits == 0
    }

    pub fn is_subset_of(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.bits & !other.bits == 0
    }

    pub fn intersect(&self, other: &BitVector) -> BitVector {
        debug_assert_eq!(self.dim, other.dim, "dimension mismatch");
        BitVector {
            bits: self.bits & other.bits,
            dim: self.dim,
        }
    }

    pub fn union(&self, other: &BitVector) -> BitVector {
        debug_assert_eq!(self.dim, other.dim, "dimension mismatch");
        BitVector {
            bits: self.bits | other.bits,
            dim: self.dim,
        }
    }

    /// Complement within `{1..dim}`.
    pub fn complement(&self) -> BitVector {
        BitVector {
            bits: !self.bits & full_mask(self.dim),
            dim: self.dim,
        }
    }

    /// 1-indexed coordinates in ascending order.
    pub fn coords(&self) -> impl Iterator<Item = u32> + '_ {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let c = rest.trailing_zeros() + 1;
                rest &= rest - 1;
                Some(c)
            }
        })
    }
}

/// True iff the common intersection of the tuple is empty.
pub fn is_orthogonal(tuple: &[BitVector]) -> Result<bool> {
    let first = tuple.first().ok_or(Error::EmptyTuple)?;
    let mut acc = first.mask();
    for v in &tuple[1..] {
        if v.dim() != first.dim() {
            return Err(Error::DimMismatch {
                left: first.dim(),
                right: v.dim(),
            });
        }
        acc &= v.mask();
    }
    Ok(acc == 0)
}

impl FromStr for BitVector {
    type Err = Error;

    /// Parses a '0'/'1' string; position `j` (leftmost = 1) is coordinate `j`.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::EmptyBitstring);
        }
        if s.len() > MAX_DIM as usize {
            return Err(Error::BitstringTooLong { len: s.len() });
        }
        let mut bits = 0u128;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1u128 << i,
                _ => {
                    return Err(Error::InvalidBitChar {
                        pos: i + 1,
                        found: ch,
                    })
                }
            }
        }
        Ok(BitVector {
            bits,
            dim: s.len() as u32,
        })
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.dim {
            let ch = if self.bits & (1u128 << j) != 0 { '1' } else { '0' };
            f.write_fmt(format_args!("{ch}"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(d={}, {{", self.dim)?;
        let mut first = true;
        for c in self.coords() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
            first = false;
        }
        write!(f, "}})")
    }
}

/// Iterates every submask of `mask`, from `mask` down to 0.
pub(crate) fn submasks(mask: u128) -> impl Iterator<Item = u128> {
    let mut cur = mask;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur;
        if cur == 0 {
            done = true;
        } else {
            cur = (cur - 1) & mask;
        }
        Some(out)
    })
}
