//! Randomized 2-OV solver with one-sided error.
//!
//! The universe is split into `ell` equal blocks and each block gets a
//! family of sampled fixed-size candidate sets. A disjoint pair (a, b) is
//! witnessed by a per-block tuple of candidates covering a and avoiding b;
//! phase 1 collects every tuple compatible with some a through
//! subset lookups, phase 2 probes the tuples compatible with some b
//! through disjointness lookups. Loop caps keep both phases inside their
//! per-size-class budgets, and reported witnesses are re-verified, so a
//! "yes" is never wrong regardless of sampling luck.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use itertools::Itertools;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::bitvec::{full_mask, submasks, BitVector};
use crate::instance::Family;
use crate::params;

/// How the per-size-class lambda is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaMode {
    /// Closed form (1 + alpha - beta) / 2.
    Analytic,
    /// Numeric min-max of the two phase exponents.
    Optimized,
}

/// How candidate families are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateMode {
    /// Sample with replacement and deduplicate; falls back to all subsets
    /// of the prescribed size whenever the sample target exceeds their
    /// number.
    Sampled,
    /// Always enumerate all subsets of the prescribed size.
    Exhaustive,
}

#[derive(Clone, Debug)]
pub struct ReprConfig {
    /// Block count; None picks clamp(ceil(d / 8), 1, d), keeping block
    /// sizes small enough for cheap lookups.
    pub ell: Option<u32>,
    /// Repetitions per size class are `rep_factor * d^2`.
    pub rep_factor: u32,
    /// Exponent of the polynomial slack in the per-block sample target.
    pub sample_poly_exponent: u32,
    /// Exponent of the polynomial slack in the phase loop caps.
    pub cap_poly_exponent: u32,
    pub seed: u64,
    pub lambda_mode: LambdaMode,
    pub candidate_mode: CandidateMode,
    pub caps_enabled: bool,
}

impl Default for ReprConfig {
    fn default() -> Self {
        ReprConfig {
            ell: None,
            rep_factor: 1,
            sample_poly_exponent: 2,
            cap_poly_exponent: 2,
            seed: 0,
            lambda_mode: LambdaMode::Optimized,
            candidate_mode: CandidateMode::Sampled,
            caps_enabled: true,
        }
    }
}

/// An equal-size partition of the (padded) universe into blocks.
#[derive(Clone, Debug)]
pub struct UniversePartition {
    blocks: Vec<u128>,
    padded_dim: u32,
    block_size: u32,
}

impl UniversePartition {
    pub fn blocks(&self) -> &[u128] {
        &self.blocks
    }

    pub fn padded_dim(&self) -> u32 {
        self.padded_dim
    }

    pub fn block_size(&self) -> u32 {
        self.block_size
    }
}

/// Pads `dim` up to a multiple of `ell` and samples a uniform equal-size
/// partition (shuffle, then chunk). Padding coordinates occur in no input
/// vector, so they never affect disjointness.
pub fn pad_and_partition(dim: u32, ell: u32, rng: &mut StdRng) -> UniversePartition {
    assert!(ell >= 1, "need at least one block");
    assert!(dim >= 1, "degenerate universe");
    let padded_dim = dim.div_ceil(ell) * ell;
    let block_size = padded_dim / ell;

    let mut coords: Vec<u32> = (0..padded_dim).collect();
    coords.shuffle(rng);
    let blocks: Vec<u128> = coords
        .chunks(block_size as usize)
        .map(|chunk| chunk.iter().fold(0u128, |m, &c| m | (1u128 << c)))
        .collect();

    debug_assert_eq!(blocks.len(), ell as usize);
    debug_assert_eq!(
        blocks.iter().fold(0u128, |acc, b| acc | b),
        full_mask(padded_dim)
    );
    UniversePartition {
        blocks,
        padded_dim,
        block_size,
    }
}

/// Everything a single size class needs: the chosen lambda and sampling
/// exponent plus the two phase caps.
#[derive(Clone, Debug)]
pub struct BucketParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub cap_a: f64,
    pub cap_b: f64,
    pub caps_enabled: bool,
}

impl BucketParams {
    pub fn derive(alpha: f64, beta: f64, padded_dim: u32, config: &ReprConfig) -> BucketParams {
        let lambda = match config.lambda_mode {
            LambdaMode::Analytic => params::lambda_analytic(alpha, beta),
            LambdaMode::Optimized => {
                params::optimize_lambda(alpha, beta, params::OPTIMIZER_TOL).0
            }
        };
        let kappa = params::kappa_min(alpha, beta, lambda);
        let e = params::exponents(alpha, beta, lambda);
        let poly = (padded_dim as f64).powi(config.cap_poly_exponent as i32);
        BucketParams {
            alpha,
            beta,
            lambda,
            kappa,
            cap_a: (e.c_a * padded_dim as f64).exp2() * poly,
            cap_b: (e.c_b * padded_dim as f64).exp2() * poly,
            caps_enabled: config.caps_enabled,
        }
    }
}

/// One candidate id per block.
pub type CertificateTuple = Vec<u32>;

/// Per-block candidate families with memoized subset ("L") and
/// disjointness ("R") lookups.
pub struct CandidateIndex {
    blocks: Vec<u128>,
    candidates: Vec<Vec<u128>>,
    subset_memo: Vec<HashMap<u128, Arc<[u32]>>>,
    disjoint_memo: Vec<HashMap<u128, Arc<[u32]>>>,
}

impl CandidateIndex {
    /// Wraps externally chosen candidate sets; every candidate must lie
    /// inside its block.
    pub fn with_candidates(partition: &UniversePartition, candidates: Vec<Vec<u128>>) -> Self {
        assert_eq!(candidates.len(), partition.blocks.len());
        for (cs, &block) in candidates.iter().zip(&partition.blocks) {
            assert!(cs.iter().all(|c| c & !block == 0), "candidate outside block");
        }
        let n = candidates.len();
        CandidateIndex {
            blocks: partition.blocks.clone(),
            candidates,
            subset_memo: vec![HashMap::new(); n],
            disjoint_memo: vec![HashMap::new(); n],
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn candidates(&self, block: usize) -> &[u128] {
        &self.candidates[block]
    }

    /// Ids of candidates in `block` containing `x`.
    pub fn lookup_l(&mut self, block: usize, x: u128) -> Arc<[u32]> {
        assert!(x & !self.blocks[block] == 0, "query outside block");
        if let Some(hit) = self.subset_memo[block].get(&x) {
            return hit.clone();
        }
        let ids: Arc<[u32]> = self.candidates[block]
            .iter()
            .enumerate()
            .filter(|(_, &c)| x & !c == 0)
            .map(|(i, _)| i as u32)
            .collect();
        self.subset_memo[block].insert(x, ids.clone());
        ids
    }

    /// Ids of candidates in `block` disjoint from `x`.
    pub fn lookup_r(&mut self, block: usize, x: u128) -> Arc<[u32]> {
        assert!(x & !self.blocks[block] == 0, "query outside block");
        if let Some(hit) = self.disjoint_memo[block].get(&x) {
            return hit.clone();
        }
        let ids: Arc<[u32]> = self.candidates[block]
            .iter()
            .enumerate()
            .filter(|(_, &c)| x & c == 0)
            .map(|(i, _)| i as u32)
            .collect();
        self.disjoint_memo[block].insert(x, ids.clone());
        ids
    }

    /// Eagerly fills both lookup tables for every subset of every block;
    /// returns the number of (query, candidate) pairs scanned, which is
    /// bounded by 2 * ell * 2^(2 * padded_dim / ell).
    pub fn precompute_all(&mut self) -> u64 {
        let mut scanned = 0u64;
        for i in 0..self.blocks.len() {
            let block = self.blocks[i];
            assert!(
                block.count_ones() <= 20,
                "eager lookup build needs small blocks"
            );
            for x in submasks(block) {
                scanned += 2 * self.candidates[i].len() as u64;
                self.lookup_l(i, x);
                self.lookup_r(i, x);
            }
        }
        scanned
    }
}

/// Draws the per-block candidate families: subsets of the block of size
/// round(lambda * block_size), targeting 2^(kappa * block_size) * d^c
/// draws, or all such subsets when that target already exceeds their
/// count.
pub fn sample_candidates(
    partition: &UniversePartition,
    bucket: &BucketParams,
    config: &ReprConfig,
    rng: &mut StdRng,
) -> CandidateIndex {
    let bs = partition.block_size;
    let subset_size = ((bucket.lambda * bs as f64 + 0.5).floor() as u32).min(bs);
    let total = binomial_u128(bs, subset_size);
    let poly = (partition.padded_dim as f64).powi(config.sample_poly_exponent as i32);
    let target = ((bucket.kappa * bs as f64).exp2() * poly).ceil().max(1.0);

    let exhaustive =
        config.candidate_mode == CandidateMode::Exhaustive || target >= total as f64;

    let candidates: Vec<Vec<u128>> = partition
        .blocks
        .iter()
        .map(|&block| {
            if exhaustive {
                all_subsets_of_size(block, subset_size)
            } else {
                let coords: Vec<u32> = (0..128).filter(|&j| block & (1u128 << j) != 0).collect();
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                for _ in 0..target as u64 {
                    let picks =
                        rand::seq::index::sample(rng, coords.len(), subset_size as usize);
                    let mask = picks.iter().fold(0u128, |m, p| m | (1u128 << coords[p]));
                    if seen.insert(mask) {
                        out.push(mask);
                    }
                }
                out
            }
        })
        .collect();

    CandidateIndex::with_candidates(partition, candidates)
}

fn all_subsets_of_size(block: u128, size: u32) -> Vec<u128> {
    let coords: Vec<u32> = (0..128).filter(|&j| block & (1u128 << j) != 0).collect();
    coords
        .iter()
        .combinations(size as usize)
        .map(|combo| combo.into_iter().fold(0u128, |m, &c| m | (1u128 << c)))
        .collect()
}

/// Exact C(n, k), saturating at u128::MAX (only the comparison with the
/// sample target matters at that magnitude).
fn binomial_u128(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        match acc.checked_mul(n - k + i) {
            Some(v) => acc = v / i,
            None => return u128::MAX,
        }
    }
    acc
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub witness: Option<(BitVector, BitVector)>,
    /// Tuples enumerated during phase 1; at most |bucket| * cap_a.
    pub insertions: u64,
    /// Members skipped because their tuple product exceeded the cap.
    pub capped_a: u64,
    pub capped_b: u64,
}

/// One pass of the two phases over a single size class.
///
/// Phase 1 inserts, for each a, every tuple from the product of per-block
/// subset lookups (skipping a entirely when the product exceeds `cap_a`),
/// remembering one originating a per tuple. Phase 2 walks the product of
/// disjointness lookups for each b and reports the first tuple already
/// present.
pub fn run_once(
    a_bucket: &[BitVector],
    b_bucket: &[BitVector],
    bucket: &BucketParams,
    partition: &UniversePartition,
    index: &mut CandidateIndex,
) -> RunOutcome {
    let ell = partition.blocks.len();
    let mut tuples: HashMap<CertificateTuple, BitVector> = HashMap::new();
    let mut insertions = 0u64;
    let mut capped_a = 0u64;
    let mut capped_b = 0u64;

    let mut lists: Vec<Arc<[u32]>> = Vec::with_capacity(ell);
    let mut key: Vec<u32> = Vec::with_capacity(ell);

    for &va in a_bucket {
        lists.clear();
        for (i, &block) in partition.blocks.iter().enumerate() {
            lists.push(index.lookup_l(i, va.mask() & block));
        }
        let product = list_product(&lists);
        if product == 0 {
            continue;
        }
        if bucket.caps_enabled && product as f64 > bucket.cap_a {
            capped_a += 1;
            continue;
        }
        for_each_tuple(&lists, &mut key, |k| {
            insertions += 1;
            if !tuples.contains_key(k) {
                tuples.insert(k.to_vec(), va);
            }
            false
        });
    }
    debug_assert!(
        !bucket.caps_enabled
            || insertions as f64 <= a_bucket.len() as f64 * bucket.cap_a + 1.0
    );

    for &vb in b_bucket {
        lists.clear();
        for (i, &block) in partition.blocks.iter().enumerate() {
            lists.push(index.lookup_r(i, vb.mask() & block));
        }
        let product = list_product(&lists);
        if product == 0 {
            continue;
        }
        if bucket.caps_enabled && product as f64 > bucket.cap_b {
            capped_b += 1;
            continue;
        }
        let mut found: Option<(BitVector, BitVector)> = None;
        for_each_tuple(&lists, &mut key, |k| {
            if let Some(&va) = tuples.get(k) {
                // A tuple covering a and avoiding b forces a and b apart.
                debug_assert!(va.is_disjoint(&vb));
                found = Some((va, vb));
                return true;
            }
            false
        });
        if found.is_some() {
            return RunOutcome {
                witness: found,
                insertions,
                capped_a,
                capped_b,
            };
        }
    }

    RunOutcome {
        witness: None,
        insertions,
        capped_a,
        capped_b,
    }
}

fn list_product(lists: &[Arc<[u32]>]) -> u128 {
    lists
        .iter()
        .fold(1u128, |p, l| p.saturating_mul(l.len() as u128))
}

/// Invokes `visit` on every tuple of the cartesian product of `lists`;
/// stops early when `visit` returns true. All lists must be nonempty.
fn for_each_tuple(
    lists: &[Arc<[u32]>],
    key: &mut Vec<u32>,
    mut visit: impl FnMut(&[u32]) -> bool,
) {
    let ell = lists.len();
    let mut idx = vec![0usize; ell];
    key.clear();
    for l in lists {
        key.push(l[0]);
    }
    loop {
        if visit(key) {
            return;
        }
        let mut pos = ell;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < lists[pos].len() {
                key[pos] = lists[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            key[pos] = lists[pos][0];
        }
    }
}

/// Decides 2-OV with one-sided error: a returned pair is always verified
/// disjoint, while "None" may be wrong with probability that vanishes in
/// the repetition count.
///
/// Members are grouped by size; each feasible size class (smaller side
/// treated as the subset phase, classes with combined size above d
/// skipped) is retried `rep_factor * d^2` times with a fresh partition
/// and fresh candidate families.
pub fn solve_2ov(a: &Family, b: &Family, config: &ReprConfig) -> Option<(BitVector, BitVector)> {
    assert_eq!(a.dim(), b.dim(), "families must share a universe");
    let d = a.dim();
    if a.is_empty() || b.is_empty() {
        return None;
    }

    // Size-0 classes short-circuit: the empty vector pairs with anything.
    if let Some(&ea) = a.members().iter().find(|m| m.is_empty()) {
        return Some((ea, b.members()[0]));
    }
    if let Some(&eb) = b.members().iter().find(|m| m.is_empty()) {
        return Some((a.members()[0], eb));
    }

    let ell = config.ell.unwrap_or_else(|| d.div_ceil(8).clamp(1, d));
    let padded_dim = d.div_ceil(ell) * ell;

    let a_buckets = buckets_by_size(a);
    let b_buckets = buckets_by_size(b);
    let reps = config.rep_factor as u64 * (d as u64).pow(2);

    let mut class_idx = 0u64;
    for (&sa, a_vecs) in &a_buckets {
        for (&sb, b_vecs) in &b_buckets {
            class_idx += 1;
            if sa + sb > d {
                continue;
            }
            let swapped = sa > sb;
            let (alpha_vecs, beta_vecs) = if swapped { (b_vecs, a_vecs) } else { (a_vecs, b_vecs) };
            let alpha = sa.min(sb) as f64 / d as f64;
            let beta = sa.max(sb) as f64 / d as f64;
            let bucket = BucketParams::derive(alpha, beta, padded_dim, config);

            for rep in 0..reps {
                let mut rng =
                    StdRng::seed_from_u64(derive_seed(config.seed, class_idx, rep));
                let partition = pad_and_partition(d, ell, &mut rng);
                let mut index = sample_candidates(&partition, &bucket, config, &mut rng);
                let out = run_once(alpha_vecs, beta_vecs, &bucket, &partition, &mut index);
                if let Some((wa, wb)) = out.witness {
                    let (wa, wb) = if swapped { (wb, wa) } else { (wa, wb) };
                    if wa.is_disjoint(&wb)
                        && a.members().contains(&wa)
                        && b.members().contains(&wb)
                    {
                        return Some((wa, wb));
                    }
                    debug_assert!(false, "witness failed verification");
                }
            }
        }
    }
    None
}

fn buckets_by_size(family: &Family) -> BTreeMap<u32, Vec<BitVector>> {
    let mut buckets: BTreeMap<u32, Vec<BitVector>> = BTreeMap::new();
    for &m in family.members() {
        buckets.entry(m.len()).or_default().push(m);
    }
    buckets
}

fn derive_seed(seed: u64, stream: u64, rep: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ rep.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
