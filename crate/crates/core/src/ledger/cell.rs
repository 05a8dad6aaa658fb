use super::{LedgerError, OfferTx, ParkingOffer, TxKind, OFFER_SYMBOLS};
use crate::field_rs::{FieldElement, MODULUS};
use crate::pir::{is_zero_row, CellLayout, Row};

/// `p u32 ‖ n u16 ‖ M u16 ‖ capacity u16 ‖ S u16`, then every row of every
/// cell in order as `S` big-endian u16 symbols.
pub const DUMP_HEADER_LEN: usize = 4 + 2 + 2 + 2 + 2;

/// One node's copy of the offer matrix, `capacity` rows per cell, stored
/// cell-major so that it is directly the PIR content vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellLedger {
    layout: CellLayout,
    rows: Vec<Row>,
}

impl CellLedger {
    pub fn new(cells: usize, capacity: usize) -> Result<Self, LedgerError> {
        if cells == 0 || cells > usize::from(u16::MAX) || capacity == 0 || capacity > usize::from(u16::MAX) {
            return Err(LedgerError::InvalidConfig(format!("{cells} cells × {capacity} rows")));
        }
        let layout = CellLayout { cells, capacity, symbols: OFFER_SYMBOLS };
        Ok(CellLedger { layout, rows: vec![vec![FieldElement::ZERO; OFFER_SYMBOLS]; layout.total_rows()] })
    }

    pub fn layout(&self) -> CellLayout {
        self.layout
    }

    /// The flattened content `(C_1^[1], …, C_cap^[1], …, C_cap^[M])`.
    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn column(&self, cell: u16) -> &[Row] {
        let start = (usize::from(cell) - 1) * self.layout.capacity;
        &self.rows[start..start + self.layout.capacity]
    }

    /// Live offers of `cell` with their row indices.
    pub fn offers(&self, cell: u16) -> Vec<(u16, ParkingOffer)> {
        self.column(cell)
            .iter()
            .enumerate()
            .filter_map(|(i, r)| ParkingOffer::from_row(r).ok().flatten().map(|o| (i as u16, o)))
            .collect()
    }

    fn index(&self, cell: u16, row: u16) -> usize {
        (usize::from(cell) - 1) * self.layout.capacity + usize::from(row)
    }

    /// The row a transaction would touch, or why it cannot be applied.
    pub fn check(&self, tx: &OfferTx) -> Result<u16, LedgerError> {
        let cell = tx.offer.cell;
        tx.offer.check_cell(self.layout.cells)?;
        match tx.kind {
            TxKind::Publish => self
                .column(cell)
                .iter()
                .position(|r| is_zero_row(r))
                .map(|i| i as u16)
                .ok_or(LedgerError::Capacity { cell, capacity: self.layout.capacity }),
            TxKind::Invalidate => {
                let row = tx.row;
                if usize::from(row) >= self.layout.capacity {
                    return Err(LedgerError::UnknownOffer { cell, row });
                }
                let stored = ParkingOffer::from_row(&self.rows[self.index(cell, row)])
                    .ok()
                    .flatten()
                    .ok_or(LedgerError::UnknownOffer { cell, row })?;
                if stored.po_key != tx.certificate.fingerprint() {
                    Err(LedgerError::NotOwner { cell, row })
                } else if stored != tx.offer {
                    Err(LedgerError::UnknownOffer { cell, row })
                } else {
                    Ok(row)
                }
            }
        }
    }

    /// Applies a transaction whose signature was already checked; returns
    /// the row written.
    pub fn apply(&mut self, tx: &OfferTx) -> Result<u16, LedgerError> {
        self.apply_logged(tx, &mut Vec::new())
    }

    /// [`apply`](Self::apply), pushing the overwritten row onto `undo`.
    pub(crate) fn apply_logged(&mut self, tx: &OfferTx, undo: &mut Vec<(usize, Row)>) -> Result<u16, LedgerError> {
        let row = self.check(tx)?;
        let idx = self.index(tx.offer.cell, row);
        let new = match tx.kind {
            TxKind::Publish => tx.offer.to_row(),
            TxKind::Invalidate => vec![FieldElement::ZERO; OFFER_SYMBOLS],
        };
        undo.push((idx, std::mem::replace(&mut self.rows[idx], new)));
        Ok(row)
    }

    pub(crate) fn rollback(&mut self, undo: Vec<(usize, Row)>) {
        for (idx, old) in undo.into_iter().rev() {
            self.rows[idx] = old;
        }
    }

    pub fn dump(&self, nodes: u16) -> Vec<u8> {
        let mut out = Vec::with_capacity(DUMP_HEADER_LEN + self.rows.len() * OFFER_SYMBOLS * 2);
        out.extend((MODULUS as u32).to_be_bytes());
        out.extend(nodes.to_be_bytes());
        out.extend((self.layout.cells as u16).to_be_bytes());
        out.extend((self.layout.capacity as u16).to_be_bytes());
        out.extend((OFFER_SYMBOLS as u16).to_be_bytes());
        for s in self.rows.iter().flatten() {
            out.extend(s.to_word().expect("ledger symbols are 16-bit words"));
        }
        out
    }

    /// Inverse of [`dump`](Self::dump); returns the node count and ledger.
    pub fn load(bytes: &[u8]) -> Result<(u16, Self), LedgerError> {
        if bytes.len() < DUMP_HEADER_LEN {
            return Err(LedgerError::Malformed("dump header"));
        }
        let u16_at = |i: usize| u16::from_be_bytes([bytes[i], bytes[i + 1]]);
        if u32::from_be_bytes(bytes[..4].try_into().expect("4 bytes")) as u64 != MODULUS {
            return Err(LedgerError::Malformed("dump field modulus"));
        }
        let (nodes, cells, capacity, symbols) = (u16_at(4), u16_at(6), u16_at(8), u16_at(10));
        if usize::from(symbols) != OFFER_SYMBOLS {
            return Err(LedgerError::Malformed("dump row width"));
        }
        let mut ledger = CellLedger::new(cells.into(), capacity.into())?;
        let body = &bytes[DUMP_HEADER_LEN..];
        if body.len() != ledger.rows.len() * OFFER_SYMBOLS * 2 {
            return Err(LedgerError::Malformed("dump body length"));
        }
        for (row, chunk) in ledger.rows.iter_mut().zip(body.chunks_exact(OFFER_SYMBOLS * 2)) {
            *row = chunk.chunks_exact(2).map(|w| FieldElement::from_word([w[0], w[1]])).collect();
        }
        Ok((nodes, ledger))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::{KdcCertifier, ParkingOperator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn pos(n: usize) -> (KdcCertifier, Vec<ParkingOperator>) {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let kdc = KdcCertifier::generate(&mut rng);
        let pos = (0..n).map(|_| ParkingOperator::new(&kdc, &mut rng)).collect();
        (kdc, pos)
    }

    #[test]
    fn publish_fills_rows_in_order_until_capacity() {
        let (_, pos) = pos(1);
        let mut ledger = CellLedger::new(3, 4).unwrap();
        assert_eq!(ledger.rows().len(), 3 * 4);
        for i in 0..4 {
            let tx = pos[0].publish(ParkingOffer { cell: 2, available: i + 1, ..Default::default() });
            assert_eq!(ledger.apply(&tx), Ok(i));
        }
        let over = pos[0].publish(ParkingOffer { cell: 2, available: 9, ..Default::default() });
        assert_eq!(ledger.apply(&over), Err(LedgerError::Capacity { cell: 2, capacity: 4 }));
        assert!(ledger.column(1).iter().chain(ledger.column(3)).all(|r| is_zero_row(r)));
        assert_eq!(ledger.offers(2).len(), 4);
    }

    #[test]
    fn invalidate_restores_state_and_checks_ownership() {
        let (_, pos) = pos(2);
        let mut ledger = CellLedger::new(2, 3).unwrap();
        let before = ledger.clone();
        let tx = pos[0].publish(ParkingOffer { cell: 1, available: 3, ..Default::default() });
        let row = ledger.apply(&tx).unwrap();

        let foreign = pos[1].invalidate(row, tx.offer);
        assert_eq!(ledger.apply(&foreign), Err(LedgerError::NotOwner { cell: 1, row }));
        let stale = pos[0].invalidate(row, ParkingOffer { available: 2, ..tx.offer });
        assert_eq!(ledger.apply(&stale), Err(LedgerError::UnknownOffer { cell: 1, row }));
        let missing = pos[0].invalidate(2, tx.offer);
        assert_eq!(ledger.apply(&missing), Err(LedgerError::UnknownOffer { cell: 1, row: 2 }));

        assert_eq!(ledger.apply(&pos[0].invalidate(row, tx.offer)), Ok(row));
        assert_eq!(ledger, before);
        // the freed row is reused
        assert_eq!(ledger.apply(&tx), Ok(0));
    }

    #[test]
    fn out_of_range_cell_rejected() {
        let (_, pos) = pos(1);
        let mut ledger = CellLedger::new(2, 3).unwrap();
        let tx = pos[0].publish(ParkingOffer { cell: 3, ..Default::default() });
        assert_eq!(ledger.apply(&tx), Err(LedgerError::CellOutOfRange { cell: 3, cells: 2 }));
    }

    #[test]
    fn dump_load_round_trip() {
        let (_, pos) = pos(1);
        let mut ledger = CellLedger::new(5, 7).unwrap();
        for c in 1..=5 {
            ledger.apply(&pos[0].publish(ParkingOffer { cell: c, available: 0xFFFF, price: 0xFF, ..Default::default() })).unwrap();
        }
        let bytes = ledger.dump(9);
        assert_eq!(bytes.len(), DUMP_HEADER_LEN + 5 * 7 * 40);
        assert_eq!(&bytes[..4], &65537u32.to_be_bytes());
        assert_eq!(CellLedger::load(&bytes), Ok((9, ledger)));
        assert!(CellLedger::load(&bytes[..bytes.len() - 1]).is_err());
        let mut wrong_p = bytes.clone();
        wrong_p[3] = 0;
        assert!(CellLedger::load(&wrong_p).is_err());
    }
}
