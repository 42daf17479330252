//! Seeded instance generators.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::bitvec::BitVector;
use crate::error::{Error, Result};
use crate::instance::{Family, Instance, PlantedInstance};

/// Draws each coordinate of each vector independently with probability
/// `density`. Reproducible given the seed.
pub fn random_instance(dim: u32, sizes: &[usize], density: f64, seed: u64) -> Result<Instance> {
    check_dim(dim)?;
    if !(0.0..=1.0).contains(&density) || density.is_nan() {
        return Err(Error::InvalidDensity(density));
    }
    if sizes.is_empty() {
        return Err(Error::InvalidArgument("need at least one family size".into()));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidArgument("family sizes must be positive".into()));
    }

    let mut rng = StdRng::seed_from_u64(seed);
    let mut families = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut members = Vec::with_capacity(n);
        for _ in 0..n {
            let mut bits = 0u128;
            for j in 0..dim {
                if rng.gen_bool(density) {
                    bits |= 1u128 << j;
                }
            }
            members.push(BitVector::from_mask(bits, dim));
        }
        families.push(Family::new(dim, members)?);
    }
    Instance::new(dim, families)
}

/// Builds an instance around a witness tuple with `round(weights[i] * d)`
/// coordinates per entry and empty common intersection; the remaining
/// `n - 1` vectors per family are random decoys of the same size.
///
/// A witness with sizes `s_i` exists iff `sum(d - s_i) >= d`: the common
/// intersection of any tuple has at least `d - sum(d - s_i)` coordinates,
/// and consecutive complement blocks wrapping around the universe realize
/// the bound.
pub fn planted_instance(
    dim: u32,
    weights: &[f64],
    n: usize,
    seed: u64,
) -> Result<PlantedInstance> {
    check_dim(dim)?;
    if weights.is_empty() {
        return Err(Error::InvalidArgument("need at least one weight".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("family size n must be positive".into()));
    }
    let mut sizes = Vec::with_capacity(weights.len());
    for &w in weights {
        if !(0.0..=1.0).contains(&w) || w.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "weight {w} outside [0, 1]"
            )));
        }
        sizes.push((w * dim as f64 + 0.5).floor() as usize);
    }

    let d = dim as usize;
    let spare: usize = sizes.iter().map(|&s| d - s).sum();
    if spare < d {
        return Err(Error::InfeasiblePlant { dim, sizes });
    }

    let mut rng = StdRng::seed_from_u64(seed);

    // Coordinates in random order; each family's witness excludes the next
    // (d - s_i) of them cyclically, so the excluded blocks cover everything.
    let mut order: Vec<u32> = (1..=dim).collect();
    order.shuffle(&mut rng);
    let mut cursor = 0usize;
    let mut witness = Vec::with_capacity(sizes.len());
    for &s in &sizes {
        let mut excluded = 0u128;
        for step in 0..(d - s) {
            let c = order[(cursor + step) % d];
            excluded |= 1u128 << (c - 1);
        }
        cursor += d - s;
        witness.push(BitVector::from_mask(
            !excluded & BitVector::full(dim).mask(),
            dim,
        ));
    }
    debug_assert!(crate::bitvec::is_orthogonal(&witness).unwrap());

    let mut families = Vec::with_capacity(sizes.len());
    for (i, &s) in sizes.iter().enumerate() {
        let mut members: Vec<BitVector> = (0..n - 1)
            .map(|_| random_subset(dim, s, &mut rng))
            .collect();
        let slot = rng.gen_range(0..=members.len());
        members.insert(slot, witness[i]);
        families.push(Family::new(dim, members)?);
    }

    Ok(PlantedInstance {
        instance: Instance::new(dim, families)?,
        witness,
    })
}

fn random_subset(dim: u32, size: usize, rng: &mut StdRng) -> BitVector {
    let picks = rand::seq::index::sample(rng, dim as usize, size);
    let mut bits = 0u128;
    for p in picks {
        bits |= 1u128 << p;
    }
    BitVector::from_mask(bits, dim)
}

fn check_dim(dim: u32) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if dim > crate::bitvec::MAX_DIM {
        return Err(Error::DimTooLarge(dim));
    }
    Ok(())
}
