use serde::{Deserialize, Serialize};

use super::LedgerError;
use crate::field_rs::FieldElement;
use crate::pir::Row;

pub const OFFER_LEN: usize = 40;
/// 16-bit symbols per offer row.
pub const OFFER_SYMBOLS: usize = OFFER_LEN / 2;

const COORD_LIMIT: i32 = 1 << 23;

/// Degrees × 10⁴ as a 24-bit signed integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Coord(i32);

impl Coord {
    pub fn new(deg_e4: i32) -> Result<Self, LedgerError> {
        if (-COORD_LIMIT..COORD_LIMIT).contains(&deg_e4) {
            Ok(Coord(deg_e4))
        } else {
            Err(LedgerError::CoordinateRange(deg_e4))
        }
    }

    pub fn from_degrees(deg: f64) -> Result<Self, LedgerError> {
        Coord::new((deg * 1e4).round() as i32)
    }

    pub fn value(self) -> i32 {
        self.0
    }

    fn to_bytes(self) -> [u8; 3] {
        let b = self.0.to_be_bytes();
        [b[1], b[2], b[3]]
    }

    fn from_bytes(b: [u8; 3]) -> Self {
        // sign-extend through the top byte
        Coord(i32::from_be_bytes([b[0], b[1], b[2], 0]) >> 8)
    }
}

impl TryFrom<i32> for Coord {
    type Error = LedgerError;
    fn try_from(v: i32) -> Result<Self, LedgerError> {
        Coord::new(v)
    }
}

impl From<Coord> for i32 {
    fn from(c: Coord) -> i32 {
        c.0
    }
}

/// `Offer = {N, C, PK_PO, loc, CS, pr, t_av}`, serialized in that order as
/// `2 + 2 + 20 + 6 + 1 + 1 + 8 = 40` big-endian bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParkingOffer {
    pub available: u16,
    pub cell: u16,
    pub po_key: [u8; 20],
    pub lat: Coord,
    pub lon: Coord,
    pub charging: bool,
    pub price: u8,
    pub available_from: u32,
    pub available_for: u32,
}

impl ParkingOffer {
    pub fn to_bytes(&self) -> [u8; OFFER_LEN] {
        let mut out = [0u8; OFFER_LEN];
        out[0..2].copy_from_slice(&self.available.to_be_bytes());
        out[2..4].copy_from_slice(&self.cell.to_be_bytes());
        out[4..24].copy_from_slice(&self.po_key);
        out[24..27].copy_from_slice(&self.lat.to_bytes());
        out[27..30].copy_from_slice(&self.lon.to_bytes());
        out[30] = self.charging as u8;
        out[31] = self.price;
        out[32..36].copy_from_slice(&self.available_from.to_be_bytes());
        out[36..40].copy_from_slice(&self.available_for.to_be_bytes());
        out
    }

    /// Parses a stored offer; cell 0 is reserved for padding rows.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LedgerError> {
        let b: &[u8; OFFER_LEN] = bytes.try_into().map_err(|_| LedgerError::Malformed("offer length"))?;
        let u16_at = |i: usize| u16::from_be_bytes([b[i], b[i + 1]]);
        let u32_at = |i: usize| u32::from_be_bytes([b[i], b[i + 1], b[i + 2], b[i + 3]]);
        let cell = u16_at(2);
        if cell == 0 {
            return Err(LedgerError::CellOutOfRange { cell, cells: usize::from(u16::MAX) });
        }
        let charging = match b[30] {
            0 => false,
            1 => true,
            _ => return Err(LedgerError::Malformed("charging flag")),
        };
        Ok(ParkingOffer {
            available: u16_at(0),
            cell,
            po_key: b[4..24].try_into().expect("20-byte slice"),
            lat: Coord::from_bytes([b[24], b[25], b[26]]),
            lon: Coord::from_bytes([b[27], b[28], b[29]]),
            charging,
            price: b[31],
            available_from: u32_at(32),
            available_for: u32_at(36),
        })
    }

    pub fn check_cell(&self, cells: usize) -> Result<(), LedgerError> {
        if self.cell == 0 || usize::from(self.cell) > cells {
            Err(LedgerError::CellOutOfRange { cell: self.cell, cells })
        } else {
            Ok(())
        }
    }

    /// The offer as twenty big-endian 16-bit field symbols.
    pub fn to_row(&self) -> Row {
        self.to_bytes()
            .chunks_exact(2)
            .map(|w| FieldElement::from_word([w[0], w[1]]))
            .collect()
    }

    /// Inverse of [`to_row`](Self::to_row); a zero row is padding.
    pub fn from_row(row: &[FieldElement]) -> Result<Option<Self>, LedgerError> {
        if row.len() != OFFER_SYMBOLS {
            return Err(LedgerError::Malformed("row width"));
        }
        if crate::pir::is_zero_row(row) {
            return Ok(None);
        }
        let mut bytes = [0u8; OFFER_LEN];
        for (dst, s) in bytes.chunks_exact_mut(2).zip(row) {
            dst.copy_from_slice(&s.to_word().ok_or(LedgerError::Malformed("symbol exceeds 16 bits"))?);
        }
        ParkingOffer::from_bytes(&bytes).map(Some)
    }
}

/// `(PK_PO, cell, row index at commit)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OfferId {
    pub po_key: [u8; 20],
    pub cell: u16,
    pub row: u16,
}
