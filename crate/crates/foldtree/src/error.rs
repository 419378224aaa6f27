use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(u32, u32),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("position out of range: {0}")]
    OutOfRange(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid object data: {0}")]
    InvalidObject(String),
    #[error("degenerate Hessian at sheet {sheet} of {src}->{dst}")]
    DegenerateHessian { src: usize, dst: usize, sheet: usize },
    #[error("non-finite state: {0}")]
    NonFinite(String),
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("integration accuracy: {0}")]
    Accuracy(String),
    #[error("non-transverse root: {0}")]
    NonTransverse(String),
}
