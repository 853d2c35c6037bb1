use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("columns are linearly dependent")]
    DependentColumns,

    #[error("NotInW: vector does not lie in the rational span of the subset's characters")]
    NotInW,

    #[error("NotCodimOne: subsets do not differ by exactly one element")]
    NotCodimOne,

    #[error("NotFullRank: matrix has rank {rank}, ambient dimension is {d}")]
    NotFullRank { rank: usize, d: usize },

    #[error("GroundSetTooLarge: {n} vectors exceed the limit of {max}")]
    GroundSetTooLarge { n: usize, max: usize },

    #[error("InstanceTooLarge: {0}")]
    InstanceTooLarge(String),

    #[error("NoBottom: found {0} elements of rank 0")]
    NoBottom(usize),

    #[error("ParseError at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("RaggedRows: line {line} has {found} entries, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("EmptyMatrix: no matrix rows found")]
    EmptyMatrix,

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
