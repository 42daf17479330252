use crate::bitvec::MAX_DIM;

/// Errors shared by the instance model, generators and solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("bitstring is empty")]
    EmptyBitstring,
    #[error("bitstring has {len} characters, maximum dimension is {MAX_DIM}")]
    BitstringTooLong { len: usize },
    #[error("invalid character {found:?} at position {pos} of bitstring (expected '0' or '1')")]
    InvalidBitChar { pos: usize, found: char },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: u32, right: u32 },
    #[error("dimension {0} exceeds the maximum of {MAX_DIM}")]
    DimTooLarge(u32),
    #[error("tuple of vectors is empty")]
    EmptyTuple,
    #[error("density must lie in [0, 1], got {0}")]
    InvalidDensity(f64),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("no witness tuple with sizes {sizes:?} and empty common intersection exists over dimension {dim}")]
    InfeasiblePlant { dim: u32, sizes: Vec<usize> },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("count exceeds the supported maximum of 2^63 - 1")]
    CountOverflow,
    #[error("down-closure needs {required} entries, budget is {budget}")]
    ClosureBudget { required: u128, budget: u64 },
    #[error("enumeration needs {required} tuples, budget is {budget}")]
    EnumerationBudget { required: u128, budget: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
