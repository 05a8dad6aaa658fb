//! Cell-indexed offer ledger replicated across the consortium nodes.
//!
//! Every node stores the same `M × capacity` matrix of 40-byte offers, one
//! offer per row of `S = 20` field symbols. Parking operators submit signed
//! PUBLISH/INVALIDATE transactions, the fixed leader (node 1) batches them
//! into blocks, and a block commits once a majority of nodes accept it.

mod block;
mod cell;
mod network;
mod offer;
mod po;
mod tx;

pub use block::{Block, BlockHeader, BLOCK_HEADER_LEN, BLOCK_TRAILER_LEN};
pub use cell::{CellLedger, DUMP_HEADER_LEN};
pub use network::{Admission, LedgerNode, Network, LEADER};
pub use offer::{Coord, OfferId, ParkingOffer, OFFER_LEN, OFFER_SYMBOLS};
pub use po::{certificate_message, KdcCertifier, ParkingOperator, PoCertificate, PO_FINGERPRINT_LEN};
pub use tx::{OfferTx, TxKind, OFFER_TX_LEN};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LedgerError {
    #[error("malformed encoding: {0}")]
    Malformed(&'static str),
    #[error("cell {cell} outside 1..={cells}")]
    CellOutOfRange { cell: u16, cells: usize },
    #[error("coordinate {0} does not fit 24 signed bits")]
    CoordinateRange(i32),
    #[error("PO key is not certified by the KDC")]
    Uncertified,
    #[error("offer transaction signature is invalid")]
    BadSignature,
    #[error("offer PK_PO does not match the signing key")]
    KeyMismatch,
    #[error("cell {cell} is at capacity ({capacity} rows)")]
    Capacity { cell: u16, capacity: usize },
    #[error("no live offer at cell {cell} row {row}")]
    UnknownOffer { cell: u16, row: u16 },
    #[error("offer at cell {cell} row {row} belongs to another PO")]
    NotOwner { cell: u16, row: u16 },
    #[error("block does not extend the local chain")]
    ChainMismatch,
    #[error("block hash mismatch")]
    BadBlockHash,
    #[error("leader is offline")]
    LeaderUnavailable,
    #[error("unknown node {0}")]
    UnknownNode(u16),
    #[error("invalid ledger configuration: {0}")]
    InvalidConfig(String),
}
