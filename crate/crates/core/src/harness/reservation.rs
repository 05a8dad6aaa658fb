use std::collections::BTreeMap;

use serde::Serialize;

use crate::anon_cred::{
    reservation_decrypt, verify_sig, GroupPublicKey, Pairing, PoEncryptionKey, RandomizedSig, ReservationCiphertext,
    RESERVATION_CIPHERTEXT_LEN,
};
use crate::ledger::{OfferId, ParkingOffer};

const REQUEST_DOMAIN: &[u8] = b"parkpir/reserve";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReservationStatus {
    Pending,
    Ack,
    Nack,
    Confirmed,
    Arrived,
    Completed,
}

impl ReservationStatus {
    /// Whether the record occupies a space.
    pub fn holds(self) -> bool {
        matches!(self, ReservationStatus::Ack | ReservationStatus::Confirmed | ReservationStatus::Arrived)
    }
}

/// `cell u16 ‖ row u16 ‖ C_D^r ‖ sig_len u16 ‖ signature`; the signature
/// covers everything before `sig_len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReservationRequest {
    pub cell: u16,
    pub row: u16,
    pub ciphertext: ReservationCiphertext,
    pub signature: Vec<u8>,
}

impl ReservationRequest {
    pub fn signed_message(cell: u16, row: u16, ciphertext: &ReservationCiphertext) -> Vec<u8> {
        let mut m = REQUEST_DOMAIN.to_vec();
        m.extend(cell.to_be_bytes());
        m.extend(row.to_be_bytes());
        m.extend(ciphertext.as_bytes());
        m
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + RESERVATION_CIPHERTEXT_LEN + 2 + self.signature.len());
        out.extend(self.cell.to_be_bytes());
        out.extend(self.row.to_be_bytes());
        out.extend(self.ciphertext.as_bytes());
        out.extend((self.signature.len() as u16).to_be_bytes());
        out.extend(&self.signature);
        out
    }

    pub fn from_bytes(b: &[u8]) -> Option<Self> {
        let head = 4 + RESERVATION_CIPHERTEXT_LEN;
        if b.len() < head + 2 {
            return None;
        }
        let sig_len = usize::from(u16::from_be_bytes([b[head], b[head + 1]]));
        if b.len() != head + 2 + sig_len {
            return None;
        }
        Some(ReservationRequest {
            cell: u16::from_be_bytes([b[0], b[1]]),
            row: u16::from_be_bytes([b[2], b[3]]),
            ciphertext: ReservationCiphertext(b[4..head].to_vec()),
            signature: b[head + 2..].to_vec(),
        })
    }
}

/// What a PO keeps per reservation request it answered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReservationRecord {
    pub offer: OfferId,
    #[serde(with = "hex_bytes")]
    pub ciphertext: Vec<u8>,
    #[serde(with = "hex_bytes")]
    pub signature: Vec<u8>,
    #[serde(with = "hex_bytes")]
    pub pk_d: Vec<u8>,
    pub t_s: u64,
    pub t_p: u64,
    pub status: ReservationStatus,
    pub down_payment: Option<[u8; 32]>,
}

mod hex_bytes {
    pub fn serialize<S: serde::Serializer>(v: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }
}

impl ReservationRecord {
    fn overlaps(&self, t_s: u64, t_p: u64) -> bool {
        self.t_s < t_s.saturating_add(t_p) && t_s < self.t_s.saturating_add(self.t_p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoReply {
    /// Accepted; the handle addresses the record in later messages.
    Ack(u32),
    Nack,
    /// Invalid request; the PO sends nothing.
    Discarded,
}

impl PoReply {
    /// `0x01 ‖ handle u32` or `0x00`; a discarded request has no reply.
    pub fn to_bytes(self) -> Option<Vec<u8>> {
        match self {
            PoReply::Ack(h) => Some([&[1u8][..], &h.to_be_bytes()].concat()),
            PoReply::Nack => Some(vec![0]),
            PoReply::Discarded => None,
        }
    }
}

/// A PO's reservation front desk: its live offers and the records it holds.
#[derive(Debug, Clone, Default)]
pub struct PoDesk {
    pub offers: Vec<(OfferId, ParkingOffer)>,
    pub records: Vec<ReservationRecord>,
    challenges: BTreeMap<u32, [u8; 32]>,
}

impl PoDesk {
    pub fn offer(&self, cell: u16, row: u16) -> Option<(OfferId, ParkingOffer)> {
        self.offers.iter().copied().find(|(id, _)| id.cell == cell && id.row == row)
    }

    /// Records holding a space of `offer` during `[t_s, t_s + t_p)`.
    pub fn holds(&self, offer: &OfferId, t_s: u64, t_p: u64) -> usize {
        self.records.iter().filter(|r| r.offer == *offer && r.status.holds() && r.overlaps(t_s, t_p)).count()
    }

    /// Verifies, decrypts and answers a reservation request.
    pub fn handle<P: Pairing>(&mut self, key: &PoEncryptionKey, gpk: &GroupPublicKey<P>, bytes: &[u8]) -> PoReply {
        let Some(req) = ReservationRequest::from_bytes(bytes) else {
            return PoReply::Discarded;
        };
        let Ok(sig) = RandomizedSig::<P>::from_bytes(&req.signature) else {
            return PoReply::Discarded;
        };
        if verify_sig(gpk, &sig, &ReservationRequest::signed_message(req.cell, req.row, &req.ciphertext)).is_err() {
            return PoReply::Discarded;
        }
        let Ok(plain) = reservation_decrypt(key, &req.ciphertext) else {
            return PoReply::Discarded;
        };
        let Some((id, offer)) = self.offer(req.cell, req.row) else {
            return PoReply::Nack;
        };
        let window_ok = plain.t_s >= u64::from(offer.available_from)
            && plain.t_s + plain.t_p <= u64::from(offer.available_from) + u64::from(offer.available_for);
        let free = self.holds(&id, plain.t_s, plain.t_p) < usize::from(offer.available);
        let status = if window_ok && free { ReservationStatus::Ack } else { ReservationStatus::Nack };
        self.records.push(ReservationRecord {
            offer: id,
            ciphertext: req.ciphertext.0,
            signature: req.signature,
            pk_d: plain.pk_d.to_vec(),
            t_s: plain.t_s,
            t_p: plain.t_p,
            status,
            down_payment: None,
        });
        match status {
            ReservationStatus::Ack => PoReply::Ack((self.records.len() - 1) as u32),
            _ => PoReply::Nack,
        }
    }

    /// Moves an ACKed record to CONFIRMED once a down payment is attached.
    pub fn confirm(&mut self, handle: u32, token: [u8; 32]) -> bool {
        match self.records.get_mut(handle as usize) {
            Some(r) if r.status == ReservationStatus::Ack => {
                r.status = ReservationStatus::Confirmed;
                r.down_payment = Some(token);
                true
            }
            _ => false,
        }
    }

    /// Issues `gamma` as the outstanding arrival challenge for `handle`.
    pub fn set_challenge(&mut self, handle: u32, gamma: [u8; 32]) {
        self.challenges.insert(handle, gamma);
    }

    /// The outstanding challenge for `handle`; each challenge is answered once.
    pub fn take_challenge(&mut self, handle: u32) -> Option<[u8; 32]> {
        self.challenges.remove(&handle)
    }

    /// Confirmed records per offer never exceed its advertised spaces at
    /// any instant.
    pub fn no_double_booking(&self) -> bool {
        self.records.iter().filter(|r| r.status.holds()).all(|r| {
            let cap = self.offers.iter().find(|(id, _)| *id == r.offer).map_or(0, |(_, o)| usize::from(o.available));
            self.records
                .iter()
                .filter(|o| o.offer == r.offer && o.status.holds() && o.overlaps(r.t_s, 1))
                .count()
                <= cap
        })
    }
}
