use sha2::{Digest, Sha256};

use super::{LedgerError, OfferTx, OFFER_TX_LEN};

/// `prev_hash (32) ‖ height u64 ‖ timestamp u32 ‖ leader u16 ‖ tx_count u16`;
/// with the 32-byte hash trailer a block costs 80 bytes beyond its txs.
pub const BLOCK_HEADER_LEN: usize = 32 + 8 + 4 + 2 + 2;
/// The block hash that closes every serialized block.
pub const BLOCK_TRAILER_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockHeader {
    pub prev_hash: [u8; 32],
    pub height: u64,
    pub timestamp: u32,
    pub leader: u16,
    pub tx_count: u16,
}

impl BlockHeader {
    fn to_bytes(self) -> [u8; BLOCK_HEADER_LEN] {
        let mut out = [0u8; BLOCK_HEADER_LEN];
        out[..32].copy_from_slice(&self.prev_hash);
        out[32..40].copy_from_slice(&self.height.to_be_bytes());
        out[40..44].copy_from_slice(&self.timestamp.to_be_bytes());
        out[44..46].copy_from_slice(&self.leader.to_be_bytes());
        out[46..].copy_from_slice(&self.tx_count.to_be_bytes());
        out
    }
}

/// Serialized as `header ‖ txs ‖ hash` with `hash = SHA-256(header ‖ txs)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub header: BlockHeader,
    pub txs: Vec<OfferTx>,
    pub hash: [u8; 32],
}

fn digest(header: &BlockHeader, txs: &[OfferTx]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(header.to_bytes());
    for tx in txs {
        h.update(tx.to_bytes());
    }
    h.finalize().into()
}

impl Block {
    /// Panics on more than `u16::MAX` transactions.
    pub fn new(prev_hash: [u8; 32], height: u64, timestamp: u32, leader: u16, txs: Vec<OfferTx>) -> Self {
        let tx_count = u16::try_from(txs.len()).expect("block holds at most 65535 transactions");
        let header = BlockHeader { prev_hash, height, timestamp, leader, tx_count };
        let hash = digest(&header, &txs);
        Block { header, txs, hash }
    }

    pub fn verify_hash(&self) -> Result<(), LedgerError> {
        if self.header.tx_count as usize == self.txs.len() && digest(&self.header, &self.txs) == self.hash {
            Ok(())
        } else {
            Err(LedgerError::BadBlockHash)
        }
    }

    pub fn encoded_len(&self) -> usize {
        BLOCK_HEADER_LEN + self.txs.len() * OFFER_TX_LEN + BLOCK_TRAILER_LEN
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend(self.header.to_bytes());
        for tx in &self.txs {
            out.extend(tx.to_bytes());
        }
        out.extend(self.hash);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LedgerError> {
        if bytes.len() < BLOCK_HEADER_LEN + BLOCK_TRAILER_LEN {
            return Err(LedgerError::Malformed("block too short"));
        }
        let (head, rest) = bytes.split_at(BLOCK_HEADER_LEN);
        let (body, hash) = rest.split_at(rest.len() - BLOCK_TRAILER_LEN);
        let header = BlockHeader {
            prev_hash: head[..32].try_into().expect("32 bytes"),
            height: u64::from_be_bytes(head[32..40].try_into().expect("8 bytes")),
            timestamp: u32::from_be_bytes(head[40..44].try_into().expect("4 bytes")),
            leader: u16::from_be_bytes([head[44], head[45]]),
            tx_count: u16::from_be_bytes([head[46], head[47]]),
        };
        if body.len() != header.tx_count as usize * OFFER_TX_LEN {
            return Err(LedgerError::Malformed("block body length"));
        }
        let txs = body.chunks_exact(OFFER_TX_LEN).map(OfferTx::from_bytes).collect::<Result<_, _>>()?;
        let block = Block { header, txs, hash: hash.try_into().expect("32 bytes") };
        block.verify_hash()?;
        Ok(block)
    }
}
