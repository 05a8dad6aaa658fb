//! Prime-field arithmetic, polynomials and Reed–Solomon error/erasure
//! decoding.

mod field;
mod poly;
mod rs;

pub use field::Fp;
pub use poly::Poly;
pub use rs::{rs_decode, rs_decode_avoiding, EvalPoints, RsCodeword};

/// Modulus of the protocol field: the Fermat prime 2^16 + 1, so every
/// 2-byte payload word is a field element.
pub const MODULUS: u64 = 65537;

pub type FieldElement = Fp<MODULUS>;
pub type FieldPoly = Poly<MODULUS>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("duplicate evaluation point {0}")]
    DuplicatePoint(u64),
    #[error("evaluation points must be nonzero")]
    ZeroEvalPoint,
    #[error("{n} distinct nonzero points do not exist mod {modulus}")]
    TooManyPoints { n: usize, modulus: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("received word has {got} symbols, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("only {available} non-erased symbols, decoding needs {needed}")]
    TooManyErasures { available: usize, needed: usize },
    #[error("no message polynomial within the error budget")]
    Uncorrectable,
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl FieldElement {
    /// 2-byte big-endian word, or `None` for the single element `2^16`
    /// that does not fit.
    pub fn to_word(self) -> Option<[u8; 2]> {
        u16::try_from(self.value()).ok().map(u16::to_be_bytes)
    }

    pub fn from_word(bytes: [u8; 2]) -> Self {
        Self::new(u16::from_be_bytes(bytes) as u64)
    }
}
