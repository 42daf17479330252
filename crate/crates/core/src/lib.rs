//! Solver toolkit for the Orthogonal Vectors problem (and its k-family
//! generalization) on low-dimensional bit-vectors.
//!
//! Given families of subsets of `{1..d}`, k-OV asks whether some
//! cross-family tuple has empty common intersection. The crate bundles:
//!
//! - [`oracle`]: brute-force reference solvers, the ground truth,
//! - [`folklore`]: exact counting over down-closures,
//! - [`mitm`]: the deterministic low/high-half 2-OV solver,
//! - [`repr`]: the randomized block-sampled 2-OV solver with one-sided
//!   error,
//! - [`kov`]: the recursive k-OV solver and the Set Cover reduction,
//! - [`params`]: the entropy and exponent formulas tying their running
//!   times together,
//! - [`gen`]: seeded instance generators.

pub mod bitvec;
pub mod error;
pub mod folklore;
pub mod gen;
pub mod instance;
pub mod kov;
pub mod mitm;
pub mod oracle;
pub mod params;
pub mod repr;

pub use bitvec::{is_orthogonal, BitVector, MAX_DIM};
pub use error::{Error, Result};
pub use instance::{
    format_instance, parse_instance, read_instance, write_instance, Family, Instance,
    PlantedInstance,
};
