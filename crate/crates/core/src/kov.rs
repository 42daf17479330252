//! Recursive deterministic k-OV and the Set Cover reduction.
//!
//! Members split at the size threshold (1 - eps_k) * d. Solutions built
//! from small members only are counted directly over down-closures;
//! solutions using a large member somewhere have few choices at those
//! positions, so they are enumerated, the universe shrinks to the
//! intersection of each guess, and a smaller-arity instance remains.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::bitvec::{BitVector, MAX_DIM};
use crate::error::{Error, Result};
use crate::folklore;
use crate::instance::{Family, Instance};
use crate::mitm;
use crate::params::{self, EpsilonTable};
use crate::repr::{self, ReprConfig};

/// Algorithm used at the 2-OV base of the recursion.
#[derive(Clone, Debug)]
pub enum Base2Solver {
    /// Deterministic meet in the middle (default).
    Mitm,
    /// The randomized block-sampled solver.
    Repr(ReprConfig),
    /// Counting over down-closures.
    Folklore,
}

#[derive(Clone, Debug)]
pub struct KovConfig {
    pub epsilon: EpsilonTable,
    /// Scale applied to the table values before the density case split.
    pub epsilon_scale: f64,
    /// Cap on the number of guessed tuples per size profile.
    pub max_enumeration_budget: u64,
    pub base2: Base2Solver,
}

impl Default for KovConfig {
    fn default() -> Self {
        KovConfig {
            epsilon: params::epsilon_table(8, params::FORMULA_TOL),
            epsilon_scale: 0.99,
            max_enumeration_budget: 1 << 21,
            base2: Base2Solver::Mitm,
        }
    }
}

/// Intersects every member with `r` and re-indexes the surviving
/// coordinates onto `1..=|r|`, preserving their order. Duplicates are
/// kept.
pub fn restrict_universe(family: &Family, r: &BitVector) -> Family {
    assert_eq!(family.dim(), r.dim(), "restriction set outside universe");
    let new_dim = r.len();
    let positions: Vec<u32> = r.coords().collect();
    let members = family
        .members()
        .iter()
        .map(|m| {
            let mut bits = 0u128;
            for (new_idx, &c) in positions.iter().enumerate() {
                if m.contains(c) {
                    bits |= 1u128 << new_idx;
                }
            }
            BitVector::from_mask(bits, new_dim)
        })
        .collect();
    Family::new(new_dim, members).expect("restriction preserves dimensions")
}

/// Exact k-OV decision.
pub fn solve(instance: &Instance, config: &KovConfig) -> Result<bool> {
    let k = instance.k();
    if instance.families().iter().any(Family::is_empty) {
        return Ok(false);
    }
    if instance.dim() == 0 {
        // Over the empty universe every vector is empty.
        return Ok(true);
    }
    match k {
        1 => Ok(instance.families()[0].members().iter().any(BitVector::is_empty)),
        2 => solve_base2(instance, config),
        _ => solve_by_sizes(instance, config),
    }
}

fn solve_base2(instance: &Instance, config: &KovConfig) -> Result<bool> {
    let (a, b) = (&instance.families()[0], &instance.families()[1]);
    match &config.base2 {
        Base2Solver::Mitm => Ok(mitm::solve_2ov(a, b).is_some()),
        Base2Solver::Repr(repr_config) => Ok(repr::solve_2ov(a, b, repr_config).is_some()),
        Base2Solver::Folklore => folklore::decide_kov(instance),
    }
}

/// Case split on member sizes. A solution tuple either consists of dense
/// members only (size fraction at most 1 - eps_k), which one counting
/// pass over the dense-filtered families decides, or it takes a sparse
/// member at some nonempty set of positions. Those positions are what the
/// per-profile sort-and-split reduces to, so they are enumerated
/// directly: guess the sparse members, restrict the universe to their
/// intersection, and recurse on the dense remainder with smaller arity.
fn solve_by_sizes(instance: &Instance, config: &KovConfig) -> Result<bool> {
    let k = instance.k();
    let d = instance.dim();
    let eps_k = epsilon_for(config, k) * config.epsilon_scale;
    let threshold = 1.0 - eps_k;
    let is_dense = |m: &BitVector| m.len() as f64 / d as f64 <= threshold;

    let dense: Vec<Vec<BitVector>> = instance
        .families()
        .iter()
        .map(|f| f.members().iter().copied().filter(is_dense).collect())
        .collect();
    let sparse: Vec<Vec<BitVector>> = instance
        .families()
        .iter()
        .map(|f| {
            f.members()
                .iter()
                .copied()
                .filter(|m| !is_dense(m))
                .collect()
        })
        .collect();

    if dense.iter().all(|m| !m.is_empty()) {
        let fams: Vec<Family> = dense
            .iter()
            .map(|m| Family::new(d, m.clone()).expect("members share dim"))
            .collect();
        if folklore::count_kov(&Instance::new(d, fams)?)? > 0 {
            return Ok(true);
        }
    }

    for positions_mask in 1u32..(1 << k) {
        let guessed: Vec<usize> = (0..k).filter(|i| positions_mask & (1 << i) != 0).collect();
        let rest: Vec<usize> = (0..k).filter(|i| positions_mask & (1 << i) == 0).collect();
        if guessed.iter().any(|&i| sparse[i].is_empty()) {
            continue;
        }
        if rest.iter().any(|&i| dense[i].is_empty()) {
            continue;
        }
        let groups: Vec<&[BitVector]> = guessed.iter().map(|&i| sparse[i].as_slice()).collect();
        check_budget(&groups, config)?;

        // Guesses with equal intersections yield identical sub-instances.
        let mut seen = HashSet::new();
        let mut verdict = Ok(false);
        for_each_guess(&groups, &mut |guess: &[BitVector]| {
            let mut acc = crate::bitvec::full_mask(d);
            for g in guess {
                acc &= g.mask();
            }
            if !seen.insert(acc) {
                return false;
            }
            if rest.is_empty() {
                if acc == 0 {
                    verdict = Ok(true);
                    return true;
                }
                return false;
            }
            let r = BitVector::from_mask(acc, d);
            let restricted: Vec<Family> = rest
                .iter()
                .map(|&i| {
                    restrict_universe(
                        &Family::new(d, dense[i].clone()).expect("members share dim"),
                        &r,
                    )
                })
                .collect();
            let sub = Instance::new(r.len(), restricted).expect("restricted families share dim");
            match solve(&sub, config) {
                Ok(true) => {
                    verdict = Ok(true);
                    true
                }
                Ok(false) => false,
                Err(e) => {
                    verdict = Err(e);
                    true
                }
            }
        });
        if verdict.as_ref().copied().unwrap_or(true) {
            return verdict;
        }
    }
    Ok(false)
}

fn check_budget(groups: &[&[BitVector]], config: &KovConfig) -> Result<()> {
    let required: u128 = groups.iter().fold(1u128, |p, g| p.saturating_mul(g.len() as u128));
    if required > config.max_enumeration_budget as u128 {
        return Err(Error::EnumerationBudget {
            required,
            budget: config.max_enumeration_budget,
        });
    }
    Ok(())
}

/// Walks the cartesian product of the groups; stops when the visitor
/// returns true.
fn for_each_guess(groups: &[&[BitVector]], visit: &mut impl FnMut(&[BitVector]) -> bool) {
    let mut idx = vec![0usize; groups.len()];
    let mut tuple: Vec<BitVector> = groups.iter().map(|g| g[0]).collect();
    loop {
        if visit(&tuple) {
            return;
        }
        let mut pos = groups.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < groups[pos].len() {
                tuple[pos] = groups[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            tuple[pos] = groups[pos][0];
        }
    }
}

fn epsilon_for(config: &KovConfig, k: usize) -> f64 {
    if k <= config.epsilon.k_max() {
        config.epsilon.get(k)
    } else {
        params::epsilon_table(k, params::FORMULA_TOL).get(k)
    }
}

/// Builds the t-family OV instance whose solutions are exactly the size-t
/// covers: each family holds the complements of the input sets.
pub fn reduce_setcover(dim: u32, sets: &Family, t: u32) -> Instance {
    assert!(t >= 1, "t must be positive");
    assert_eq!(sets.dim(), dim, "dimension mismatch");
    let complements: Vec<BitVector> = sets.members().iter().map(BitVector::complement).collect();
    let family = Family::new(dim, complements).expect("complements share dim");
    Instance::new(dim, vec![family; t as usize]).expect("t >= 1")
}

/// Set Cover decided through the OV reduction; matches the brute-force
/// cover check on all inputs.
pub fn decide_setcover(dim: u32, sets: &Family, t: u32, config: &KovConfig) -> Result<bool> {
    solve(&reduce_setcover(dim, sets, t), config)
}

/// A Set Cover input: does some `t`-tuple from `sets` cover `{1..dim}`?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetCoverInstance {
    pub dim: u32,
    pub sets: Family,
    pub t: u32,
}

/// Text format: line 1 is `d m t`, then `m` length-`d` bitstrings.
pub fn parse_setcover(text: &str) -> Result<SetCoverInstance> {
    let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
        let t = raw.trim_end_matches('\r');
        if t.trim().is_empty() {
            None
        } else {
            Some((i + 1, t))
        }
    });

    let (line_no, header) = lines.next().ok_or_else(|| Error::Format {
        line: 0,
        msg: "empty set cover file".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::Format {
            line: line_no,
            msg: "header must be \"d m t\"".into(),
        });
    }
    let d: u32 = parse_num(fields[0], line_no, "dimension d")?;
    let m: usize = parse_num(fields[1], line_no, "set count m")?;
    let t: u32 = parse_num(fields[2], line_no, "cover size t")?;
    if d == 0 || d > MAX_DIM {
        return Err(Error::Format {
            line: line_no,
            msg: format!("dimension must be in 1..={MAX_DIM}"),
        });
    }
    if t == 0 {
        return Err(Error::Format {
            line: line_no,
            msg: "cover size t must be positive".into(),
        });
    }

    let mut members = Vec::with_capacity(m);
    for _ in 0..m {
        let (line_no, row) = lines.next().ok_or_else(|| Error::Format {
            line: 0,
            msg: "missing set rows".into(),
        })?;
        let v: BitVector = row
            .parse()
            .map_err(|e| Error::Format {
                line: line_no,
                msg: format!("bad bitstring: {e}"),
            })?;
        if v.dim() != d {
            return Err(Error::Format {
                line: line_no,
                msg: format!("row length {} does not match d={d}", v.dim()),
            });
        }
        members.push(v);
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(Error::Format {
            line: line_no,
            msg: "trailing content after the last set".into(),
        });
    }

    Ok(SetCoverInstance {
        dim: d,
        sets: Family::new(d, members)?,
        t,
    })
}

pub fn format_setcover(sc: &SetCoverInstance) -> String {
    let mut out = format!("{} {} {}\n", sc.dim, sc.sets.len(), sc.t);
    for s in sc.sets.members() {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

pub fn read_setcover(path: impl AsRef<Path>) -> Result<SetCoverInstance> {
    parse_setcover(&fs::read_to_string(path)?)
}

pub fn write_setcover(sc: &SetCoverInstance, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, format_setcover(sc))?)
}

fn parse_num<T: std::str::FromStr>(field: &str, line: usize, what: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Format {
        line,
        msg: format!("cannot parse {what}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_instance;
    use crate::oracle::{decide_brute, decide_setcover_brute};
    use proptest::prelude::*;

    fn bv(dim: u32, coords: &[u32]) -> BitVector {
        BitVector::from_coords(dim, coords)
    }

    fn fam(dim: u32, members: Vec<BitVector>) -> Family {
        Family::new(dim, members).unwrap()
    }

    fn inst(dim: u32, families: Vec<Vec<BitVector>>) -> Instance {
        Instance::new(dim, families.into_iter().map(|m| fam(dim, m)).collect()).unwrap()
    }

    #[test]
    fn restrict_to_full_universe_is_identity() {
        let f = fam(3, vec![bv(3, &[1, 3]), bv(3, &[2])]);
        let r = BitVector::full(3);
        assert_eq!(restrict_universe(&f, &r), f);
    }

    #[test]
    fn restrict_to_empty_universe() {
        let f = fam(3, vec![bv(3, &[1, 3]), bv(3, &[2])]);
        let r = BitVector::empty(3);
        let restricted = restrict_universe(&f, &r);
        assert_eq!(restricted.dim(), 0);
        assert!(restricted.members().iter().all(BitVector::is_empty));
    }

    #[test]
    fn restrict_reindexes_in_order() {
        let f = fam(3, vec![bv(3, &[1, 3]), bv(3, &[2])]);
        let r = bv(3, &[1, 2]);
        let restricted = restrict_universe(&f, &r);
        assert_eq!(restricted.members(), &[bv(2, &[1]), bv(2, &[2])]);
    }

    #[test]
    fn solve_single_family() {
        let cfg = KovConfig::default();
        let yes = inst(2, vec![vec![bv(2, &[1]), BitVector::empty(2)]]);
        let no = inst(2, vec![vec![bv(2, &[1])]]);
        assert!(solve(&yes, &cfg).unwrap());
        assert!(!solve(&no, &cfg).unwrap());
    }

    #[test]
    fn solve_three_families() {
        let i = inst(
            3,
            vec![
                vec![bv(3, &[1]), bv(3, &[1, 2])],
                vec![bv(3, &[2])],
                vec![bv(3, &[3])],
            ],
        );
        assert!(solve(&i, &KovConfig::default()).unwrap());
        assert!(decide_brute(&i));
    }

    #[test]
    fn solve_full_sets_negative() {
        let i = inst(4, vec![vec![BitVector::full(4)]; 3]);
        assert!(!solve(&i, &KovConfig::default()).unwrap());
    }

    #[test]
    fn reduction_complements_sets() {
        let f = fam(2, vec![bv(2, &[1]), bv(2, &[2])]);
        let reduced = reduce_setcover(2, &f, 2);
        assert_eq!(reduced.k(), 2);
        for family in reduced.families() {
            assert_eq!(family.members(), &[bv(2, &[2]), bv(2, &[1])]);
        }
        assert!(decide_brute(&reduced));
        assert!(decide_setcover_brute(2, &f, 2));
    }

    #[test]
    fn reduction_full_set_cover() {
        let f = fam(3, vec![BitVector::full(3)]);
        let reduced = reduce_setcover(3, &f, 2);
        assert!(reduced.families()[0].members()[0].is_empty());
        assert!(decide_brute(&reduced));
    }

    #[test]
    fn reduction_empty_set_never_covers() {
        let f = fam(3, vec![BitVector::empty(3)]);
        let reduced = reduce_setcover(3, &f, 2);
        assert!(!decide_brute(&reduced));
        assert!(!decide_setcover_brute(3, &f, 2));
    }

    #[test]
    fn setcover_via_ov_examples() {
        let cfg = KovConfig::default();
        let f = fam(2, vec![bv(2, &[1]), bv(2, &[2])]);
        assert!(decide_setcover(2, &f, 2, &cfg).unwrap());
        assert!(decide_setcover(2, &f, 4, &cfg).unwrap());
        let empty = fam(2, vec![]);
        assert!(!decide_setcover(2, &empty, 2, &cfg).unwrap());
    }

    #[test]
    fn budget_error_reported() {
        let cfg = KovConfig {
            max_enumeration_budget: 4,
            ..KovConfig::default()
        };
        // Three families of full sets: the dense branch must enumerate
        // 3^3 > 4 tuples.
        let i = inst(4, vec![vec![BitVector::full(4); 3]; 3]);
        assert!(matches!(
            solve(&i, &cfg),
            Err(Error::EnumerationBudget { .. })
        ));
    }

    #[test]
    fn setcover_round_trip() {
        let sc = SetCoverInstance {
            dim: 3,
            sets: fam(3, vec![bv(3, &[1, 2]), bv(3, &[2, 3])]),
            t: 2,
        };
        let text = format_setcover(&sc);
        assert_eq!(text, "3 2 2\n110\n011\n");
        assert_eq!(parse_setcover(&text).unwrap(), sc);
    }

    #[test]
    fn setcover_parse_errors() {
        assert!(parse_setcover("").is_err());
        assert!(parse_setcover("2 1\n01\n").is_err());
        assert!(parse_setcover("2 1 0\n01\n").is_err());
        assert!(parse_setcover("2 2 1\n01\n").is_err());
        assert!(parse_setcover("2 1 1\n011\n").is_err());
    }

    #[test]
    fn deterministic_across_runs() {
        let i = random_instance(10, &[8, 8, 8], 0.6, 42).unwrap();
        let cfg = KovConfig::default();
        let first = solve(&i, &cfg).unwrap();
        for _ in 0..3 {
            assert_eq!(solve(&i, &cfg).unwrap(), first);
        }
    }

    #[test]
    fn restriction_preserves_orthogonality() {
        for seed in 0..50u64 {
            let i = random_instance(6, &[4, 4], 0.5, seed).unwrap();
            let r = bv(6, &[2, 3, 5]);
            let restricted = Instance::new(
                3,
                i.families()
                    .iter()
                    .map(|f| restrict_universe(f, &r))
                    .collect(),
            )
            .unwrap();
            // Orthogonality inside r: intersect everything with r first.
            let masked = Instance::new(
                6,
                i.families()
                    .iter()
                    .map(|f| {
                        fam(
                            6,
                            f.members().iter().map(|m| m.intersect(&r)).collect(),
                        )
                    })
                    .collect(),
            )
            .unwrap();
            assert_eq!(decide_brute(&restricted), decide_brute(&masked));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]

        #[test]
        fn matches_brute_force(seed in 0u64..20_000) {
            let d = 1 + (seed % 14) as u32;
            let k = 1 + (seed / 14 % 4) as usize;
            let n = 1 + (seed / 56 % 24) as usize;
            let density = [0.2, 0.5, 0.8][(seed / 1500 % 3) as usize];
            let i = random_instance(d, &vec![n; k], density, seed).unwrap();
            prop_assert_eq!(
                solve(&i, &KovConfig::default()).unwrap(),
                decide_brute(&i)
            );
        }

        #[test]
        fn setcover_reduction_matches_brute(seed in 0u64..5_000) {
            let d = 1 + (seed % 8) as u32;
            let m = 1 + (seed / 8 % 8) as usize;
            let t = 1 + (seed / 64 % 4) as u32;
            let sets = random_instance(d, &[m], 0.4, seed).unwrap().families()[0].clone();
            prop_assert_eq!(
                decide_setcover(d, &sets, t, &KovConfig::default()).unwrap(),
                decide_setcover_brute(d, &sets, t)
            );
        }
    }
}
