//! Byzantine-robust, collusion-resistant PIR over replicated cell storage.
//!
//! A retrieval of cell `d` sends node `j` one field element per stored
//! row: a random degree `t-1` polynomial evaluated at `α_j`, plus
//! `α_j^{n-2b-r-ℓ}` on the rows of the desired cell. Node answers are inner
//! products with the node's content, and together they are evaluations of
//! a polynomial of degree `n-2b-r-1`. Reed–Solomon decoding recovers it
//! despite `b` wrong answers and `r` missing ones, and its top `L`
//! coefficients are the desired rows.

mod params;
mod query;
mod reconstruct;
mod retrieve;
pub mod wire;

use crate::field_rs::{DecodeError, FieldElement};

pub use params::{retrieval_rate, CellLayout, PirParams};
pub use query::{answer_query, make_queries, PirQuery, PirResponse, QueryRandomness, ResponseBody};
pub use reconstruct::reconstruct;
pub use retrieve::{retrieve_cell, PirServers, RetrievedCell};

/// One stored row: `S` field symbols.
pub type Row = Vec<FieldElement>;

pub fn is_zero_row(row: &[FieldElement]) -> bool {
    row.iter().all(|s| s.is_zero())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PirError {
    #[error("invalid PIR parameters: {0}")]
    InvalidParams(String),
    #[error("desired cell {desired} outside 1..={cells}")]
    CellOutOfRange { desired: usize, cells: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("response from node {node} for stripe {got}, expected stripe {expected}")]
    StripeMismatch { node: u16, expected: u16, got: u16 },
    #[error("decoding failed at symbol {symbol}: {source}")]
    DecodeFailure {
        symbol: usize,
        #[source]
        source: DecodeError,
    },
    #[error("malformed wire message: {0}")]
    Wire(String),
}
