use ed25519_dalek::{Signature, Signer, SigningKey, VerifyingKey};
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use super::{LedgerError, OfferTx, ParkingOffer, TxKind};
use crate::anon_cred::PoEncryptionKey;

pub const PO_FINGERPRINT_LEN: usize = 20;
const CERT_DOMAIN: &[u8] = b"parkpir/po-cert";

/// A PO's certified public material: its Ed25519 transaction key, its
/// X25519 reservation key, and the KDC's signature binding the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoCertificate {
    pub signing_key: [u8; 32],
    pub encryption_key: [u8; 32],
    pub kdc_signature: [u8; 64],
}

pub fn certificate_message(signing_key: &[u8; 32], encryption_key: &[u8; 32]) -> Vec<u8> {
    [CERT_DOMAIN, signing_key, encryption_key].concat()
}

impl PoCertificate {
    /// `PK_PO` as stored in offers: the first 20 bytes of
    /// `SHA-256(signing_key ‖ encryption_key)`.
    pub fn fingerprint(&self) -> [u8; PO_FINGERPRINT_LEN] {
        let d = Sha256::new().chain_update(self.signing_key).chain_update(self.encryption_key).finalize();
        d[..PO_FINGERPRINT_LEN].try_into().expect("digest is 32 bytes")
    }

    pub fn verify(&self, kdc: &VerifyingKey) -> Result<(), LedgerError> {
        let sig = Signature::from_bytes(&self.kdc_signature);
        kdc.verify_strict(&certificate_message(&self.signing_key, &self.encryption_key), &sig)
            .map_err(|_| LedgerError::Uncertified)
    }
}

/// The KDC's certification key for parking operators.
#[derive(Debug, Clone)]
pub struct KdcCertifier {
    key: SigningKey,
}

impl KdcCertifier {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        KdcCertifier { key: SigningKey::generate(rng) }
    }

    pub fn verifying_key(&self) -> VerifyingKey {
        self.key.verifying_key()
    }

    pub fn certify(&self, signing_key: &[u8; 32], encryption_key: &[u8; 32]) -> PoCertificate {
        PoCertificate {
            signing_key: *signing_key,
            encryption_key: *encryption_key,
            kdc_signature: self.key.sign(&certificate_message(signing_key, encryption_key)).to_bytes(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParkingOperator {
    signing: SigningKey,
    encryption: PoEncryptionKey,
    certificate: PoCertificate,
}

impl ParkingOperator {
    /// Fresh keys, certified by `kdc`.
    pub fn new<R: RngCore + CryptoRng>(kdc: &KdcCertifier, rng: &mut R) -> Self {
        let signing = SigningKey::generate(rng);
        let encryption = PoEncryptionKey::generate(rng);
        let certificate = kdc.certify(&signing.verifying_key().to_bytes(), &encryption.public());
        ParkingOperator { signing, encryption, certificate }
    }

    /// Keys that were never certified; the certificate is self-signed.
    pub fn uncertified<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        ParkingOperator::new(&KdcCertifier::generate(rng), rng)
    }

    pub fn certificate(&self) -> &PoCertificate {
        &self.certificate
    }

    pub fn fingerprint(&self) -> [u8; PO_FINGERPRINT_LEN] {
        self.certificate.fingerprint()
    }

    pub fn encryption_key(&self) -> &PoEncryptionKey {
        &self.encryption
    }

    /// Stamps the PO's fingerprint into `offer` and signs a PUBLISH.
    pub fn publish(&self, mut offer: ParkingOffer) -> OfferTx {
        offer.po_key = self.fingerprint();
        self.sign(TxKind::Publish, 0, offer)
    }

    /// Signs an INVALIDATE of the live offer at `row`.
    pub fn invalidate(&self, row: u16, offer: ParkingOffer) -> OfferTx {
        self.sign(TxKind::Invalidate, row, offer)
    }

    pub(crate) fn sign(&self, kind: TxKind, row: u16, offer: ParkingOffer) -> OfferTx {
        let mut tx = OfferTx { kind, row, offer, certificate: self.certificate, signature: [0u8; 64] };
        tx.signature = self.signing.sign(&tx.signed_bytes()).to_bytes();
        tx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn certificates_bind_the_kdc() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let kdc = KdcCertifier::generate(&mut rng);
        let po = ParkingOperator::new(&kdc, &mut rng);
        assert!(po.certificate().verify(&kdc.verifying_key()).is_ok());
        let rogue = ParkingOperator::uncertified(&mut rng);
        assert_eq!(rogue.certificate().verify(&kdc.verifying_key()), Err(LedgerError::Uncertified));

        let mut swapped = *po.certificate();
        swapped.encryption_key = rogue.certificate().encryption_key;
        assert!(swapped.verify(&kdc.verifying_key()).is_err());
        assert_ne!(po.fingerprint(), rogue.fingerprint());
    }
}
