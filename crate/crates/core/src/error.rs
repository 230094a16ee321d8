use thiserror::Error;

use crate::parse::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("fiber dimension 2n = {0} must be even and at least 2")]
    InvalidDimension(usize),

    #[error("invalid symmetric index {entries:?} for 2n = {two_n}: {reason}")]
    InvalidSymIndex { two_n: usize, entries: Vec<usize>, reason: &'static str },

    #[error("invalid form index {entries:?} for 2n = {two_n}")]
    InvalidFormIndex { two_n: usize, entries: Vec<usize> },

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: String, max: String },

    #[error("operands disagree on chart data: 2n {left_dim} vs {right_dim}, order {left_order} vs {right_order}")]
    Mismatch { left_dim: usize, right_dim: usize, left_order: u32, right_order: u32 },

    #[error("division by i*hbar left a nonzero hbar^0 term in {context}")]
    HbarResidue { context: &'static str },

    #[error("connection is not totally symmetric: Gamma{first:?} = {first_poly} but Gamma{second:?} = {second_poly}")]
    SymmetryViolation {
        first: [usize; 3],
        first_poly: String,
        second: [usize; 3],
        second_poly: String,
    },

    #[error("connection index {index:?} out of range for 2n = {two_n}")]
    ConnectionIndex { two_n: usize, index: [usize; 3] },

    #[error("{check} fails at {term}: {left} vs {right}")]
    IdentityMismatch { check: &'static str, term: String, left: String, right: String },

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
