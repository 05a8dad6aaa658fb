use ed25519_dalek::{Signature, VerifyingKey};

use super::{LedgerError, ParkingOffer, PoCertificate, OFFER_LEN};

/// `kind (1) ‖ row (2) ‖ offer (40) ‖ signing key (32) ‖ encryption key (32)
/// ‖ KDC certificate signature (64) ‖ PO signature (64)`.
pub const OFFER_TX_LEN: usize = 1 + 2 + OFFER_LEN + 32 + 32 + 64 + 64;
const SIGNED_LEN: usize = OFFER_TX_LEN - 64;
const TX_DOMAIN: &[u8] = b"parkpir/offer-tx";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxKind {
    Publish,
    Invalidate,
}

impl TxKind {
    fn code(self) -> u8 {
        match self {
            TxKind::Publish => 1,
            TxKind::Invalidate => 2,
        }
    }
}

/// A PO-signed ledger transaction. PUBLISH carries row 0 and lands in the
/// first free row of `offer.cell`; INVALIDATE names the row and repeats the
/// live offer it removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OfferTx {
    pub kind: TxKind,
    pub row: u16,
    pub offer: ParkingOffer,
    pub certificate: PoCertificate,
    pub signature: [u8; 64],
}

impl OfferTx {
    pub(crate) fn signed_bytes(&self) -> Vec<u8> {
        let mut out = TX_DOMAIN.to_vec();
        out.extend(&self.to_bytes()[..SIGNED_LEN]);
        out
    }

    pub fn to_bytes(&self) -> [u8; OFFER_TX_LEN] {
        let mut out = [0u8; OFFER_TX_LEN];
        out[0] = self.kind.code();
        out[1..3].copy_from_slice(&self.row.to_be_bytes());
        out[3..43].copy_from_slice(&self.offer.to_bytes());
        out[43..75].copy_from_slice(&self.certificate.signing_key);
        out[75..107].copy_from_slice(&self.certificate.encryption_key);
        out[107..171].copy_from_slice(&self.certificate.kdc_signature);
        out[171..].copy_from_slice(&self.signature);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LedgerError> {
        let b: &[u8; OFFER_TX_LEN] = bytes.try_into().map_err(|_| LedgerError::Malformed("offer tx length"))?;
        let kind = match b[0] {
            1 => TxKind::Publish,
            2 => TxKind::Invalidate,
            _ => return Err(LedgerError::Malformed("offer tx kind")),
        };
        Ok(OfferTx {
            kind,
            row: u16::from_be_bytes([b[1], b[2]]),
            offer: ParkingOffer::from_bytes(&b[3..43])?,
            certificate: PoCertificate {
                signing_key: b[43..75].try_into().expect("32 bytes"),
                encryption_key: b[75..107].try_into().expect("32 bytes"),
                kdc_signature: b[107..171].try_into().expect("64 bytes"),
            },
            signature: b[171..].try_into().expect("64 bytes"),
        })
    }

    /// State-independent admission checks: KDC certificate, PO signature,
    /// and that the offer names the signing PO.
    pub fn verify(&self, kdc: &VerifyingKey) -> Result<(), LedgerError> {
        self.certificate.verify(kdc)?;
        self.verify_signature()
    }

    /// [`verify`](Self::verify) minus the certificate check.
    pub fn verify_signature(&self) -> Result<(), LedgerError> {
        let vk = VerifyingKey::from_bytes(&self.certificate.signing_key).map_err(|_| LedgerError::BadSignature)?;
        vk.verify_strict(&self.signed_bytes(), &Signature::from_bytes(&self.signature))
            .map_err(|_| LedgerError::BadSignature)?;
        if self.kind == TxKind::Publish && self.offer.po_key != self.certificate.fingerprint() {
            return Err(LedgerError::KeyMismatch);
        }
        if self.kind == TxKind::Publish && self.row != 0 {
            return Err(LedgerError::Malformed("PUBLISH carries a row index"));
        }
        Ok(())
    }
}
