use std::collections::HashMap;

use ed25519_dalek::VerifyingKey;

use super::{Block, CellLedger, LedgerError, OfferTx, PoCertificate, PO_FINGERPRINT_LEN};
use crate::pir::Row;

/// The fixed leader.
pub const LEADER: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    Committed { height: u64, cell: u16, row: u16 },
    /// Valid, but no majority acknowledged the block; queued for retry.
    Pending,
}

#[derive(Debug, Clone)]
pub struct LedgerNode {
    pub id: u16,
    pub online: bool,
    ledger: CellLedger,
    chain: Vec<Block>,
    certified: HashMap<[u8; PO_FINGERPRINT_LEN], PoCertificate>,
}

impl LedgerNode {
    pub fn ledger(&self) -> &CellLedger {
        &self.ledger
    }

    pub fn chain(&self) -> &[Block] {
        &self.chain
    }

    /// Height of the tip; the genesis block is height 0.
    pub fn height(&self) -> u64 {
        self.chain.len() as u64 - 1
    }

    fn tip(&self) -> &Block {
        self.chain.last().expect("chain starts at genesis")
    }

    fn validate_tx(&mut self, tx: &OfferTx, kdc: &VerifyingKey) -> Result<(), LedgerError> {
        let fp = tx.certificate.fingerprint();
        if self.certified.get(&fp) != Some(&tx.certificate) {
            tx.certificate.verify(kdc)?;
            self.certified.insert(fp, tx.certificate);
        }
        tx.verify_signature()
    }

    /// Applies every transaction of `block`, or none of them.
    fn stage(&mut self, block: &Block, kdc: &VerifyingKey) -> Result<Vec<(usize, Row)>, LedgerError> {
        if block.header.prev_hash != self.tip().hash || block.header.height != self.height() + 1 {
            return Err(LedgerError::ChainMismatch);
        }
        block.verify_hash()?;
        let mut undo = Vec::new();
        for tx in &block.txs {
            let res = self.validate_tx(tx, kdc).and_then(|_| self.ledger.apply_logged(tx, &mut undo));
            if let Err(e) = res {
                self.ledger.rollback(undo);
                return Err(e);
            }
        }
        Ok(undo)
    }

    fn vote(&mut self, block: &Block, kdc: &VerifyingKey) -> bool {
        match self.stage(block, kdc) {
            Ok(undo) => {
                self.ledger.rollback(undo);
                true
            }
            Err(_) => false,
        }
    }

    fn commit(&mut self, block: &Block, kdc: &VerifyingKey) -> Result<(), LedgerError> {
        self.stage(block, kdc)?;
        self.chain.push(block.clone());
        Ok(())
    }
}

/// `n` replicas with a fixed leader and majority-ack commit.
#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<LedgerNode>,
    kdc: VerifyingKey,
    clock: u32,
    pending: Vec<OfferTx>,
}

impl Network {
    pub fn new(n: usize, cells: usize, capacity: usize, kdc: VerifyingKey) -> Result<Self, LedgerError> {
        if n == 0 || n > usize::from(u16::MAX) {
            return Err(LedgerError::InvalidConfig(format!("{n} nodes")));
        }
        let ledger = CellLedger::new(cells, capacity)?;
        let genesis = Block::new([0; 32], 0, 0, LEADER, Vec::new());
        let nodes = (1..=n as u16)
            .map(|id| LedgerNode {
                id,
                online: true,
                ledger: ledger.clone(),
                chain: vec![genesis.clone()],
                certified: HashMap::new(),
            })
            .collect();
        Ok(Network { nodes, kdc, clock: 0, pending: Vec::new() })
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[LedgerNode] {
        &self.nodes
    }

    pub fn node(&self, id: u16) -> Result<&LedgerNode, LedgerError> {
        self.nodes.get(usize::from(id).wrapping_sub(1)).ok_or(LedgerError::UnknownNode(id))
    }

    fn node_mut(&mut self, id: u16) -> Result<&mut LedgerNode, LedgerError> {
        self.nodes.get_mut(usize::from(id).wrapping_sub(1)).ok_or(LedgerError::UnknownNode(id))
    }

    pub fn set_online(&mut self, id: u16, online: bool) -> Result<(), LedgerError> {
        self.node_mut(id)?.online = online;
        Ok(())
    }

    /// Timestamp stamped into subsequent blocks.
    pub fn set_clock(&mut self, now: u32) {
        self.clock = now;
    }

    /// The leader's committed height.
    pub fn height(&self) -> u64 {
        self.nodes[0].height()
    }

    pub fn pending(&self) -> &[OfferTx] {
        &self.pending
    }

    /// The content vector `Y_j` of node `id`.
    pub fn snapshot(&self, id: u16) -> Result<Vec<Row>, LedgerError> {
        Ok(self.node(id)?.ledger.rows().to_vec())
    }

    pub fn submit(&mut self, tx: OfferTx) -> Result<Admission, LedgerError> {
        self.submit_batch(vec![tx]).pop().expect("one result per transaction")
    }

    /// Validates each transaction at the leader and proposes the valid ones
    /// as one block. Invalid transactions never reach any replica.
    pub fn submit_batch(&mut self, txs: Vec<OfferTx>) -> Vec<Result<Admission, LedgerError>> {
        if !self.nodes[0].online {
            return txs.iter().map(|_| Err(LedgerError::LeaderUnavailable)).collect();
        }
        let kdc = self.kdc;
        let leader = &mut self.nodes[0];
        let mut undo = Vec::new();
        let mut results = Vec::with_capacity(txs.len());
        let mut accepted = Vec::new();
        for tx in txs {
            match leader.validate_tx(&tx, &kdc).and_then(|_| leader.ledger.apply_logged(&tx, &mut undo)) {
                Ok(row) => {
                    results.push(Ok((tx.offer.cell, row)));
                    accepted.push(tx);
                }
                Err(e) => results.push(Err(e)),
            }
        }
        leader.ledger.rollback(undo);
        if accepted.is_empty() {
            return results.into_iter().map(|r| Err(r.expect_err("nothing was accepted"))).collect();
        }

        let block = Block::new(leader.tip().hash, leader.height() + 1, self.clock, LEADER, accepted);
        let height = block.header.height;
        for id in 2..=self.n() as u16 {
            if self.nodes[usize::from(id) - 1].online {
                self.sync(id).ok();
            }
        }
        let voters: Vec<usize> = (0..self.n())
            .filter(|&i| self.nodes[i].online && self.nodes[i].vote(&block, &kdc))
            .collect();
        if 2 * voters.len() > self.n() {
            for i in voters {
                self.nodes[i].commit(&block, &kdc).expect("a node that voted for the block can apply it");
            }
            results
                .into_iter()
                .map(|r| r.map(|(cell, row)| Admission::Committed { height, cell, row }))
                .collect()
        } else {
            self.pending.extend(block.txs);
            results.into_iter().map(|r| r.map(|_| Admission::Pending)).collect()
        }
    }

    /// Re-proposes every queued transaction.
    pub fn retry_pending(&mut self) -> Vec<Result<Admission, LedgerError>> {
        let txs = std::mem::take(&mut self.pending);
        self.submit_batch(txs)
    }

    /// Replays the leader's blocks that node `id` is missing; returns how
    /// many were applied.
    pub fn sync(&mut self, id: u16) -> Result<usize, LedgerError> {
        let kdc = self.kdc;
        let from = self.node(id)?.chain.len();
        let missing: Vec<Block> = self.nodes[0].chain.get(from..).unwrap_or_default().to_vec();
        let node = self.node_mut(id)?;
        for block in &missing {
            node.commit(block, &kdc)?;
        }
        Ok(missing.len())
    }

    /// Nodes at equal heights hold identical chains and ledgers.
    pub fn replicas_consistent(&self) -> bool {
        let leader = &self.nodes[0];
        self.nodes.iter().all(|node| {
            let h = node.chain.len();
            h <= leader.chain.len()
                && node.chain.last().map(|b| b.hash) == leader.chain.get(h - 1).map(|b| b.hash)
                && (h != leader.chain.len() || node.ledger == leader.ledger)
        })
    }
}
