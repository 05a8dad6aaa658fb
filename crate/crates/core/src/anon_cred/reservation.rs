//! `C_D^r = Enc_{PK_PO}(PK_D, t_s, t_p)` as X25519 ECIES with
//! ChaCha20-Poly1305.
//!
//! Layout: `eph_pub (32) ‖ AEAD(PK_D (32) ‖ t_s u64 BE ‖ t_p u64 BE) ‖ tag (16)`.
//! The AEAD key is `SHA-256(domain ‖ eph_pub ‖ po_pub ‖ shared)`; since
//! every ciphertext has its own ephemeral key, the nonce is fixed at zero.

use chacha20poly1305::aead::{Aead, KeyInit};
use chacha20poly1305::{ChaCha20Poly1305, Nonce};
use rand::{CryptoRng, RngCore};
use x25519_dalek::{PublicKey, StaticSecret};

use super::{ops, CredentialError, EPHEMERAL_PK_LEN};

const KDF_DOMAIN: &[u8] = b"parkpir/reservation";
const PLAINTEXT_LEN: usize = EPHEMERAL_PK_LEN + 16;
pub const RESERVATION_CIPHERTEXT_LEN: usize = 32 + PLAINTEXT_LEN + 16;

/// A parking operator's encryption keypair.
#[derive(Clone)]
pub struct PoEncryptionKey {
    secret: StaticSecret,
    public: PublicKey,
}

impl std::fmt::Debug for PoEncryptionKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PoEncryptionKey").field("public", &hex::encode(self.public.as_bytes())).finish()
    }
}

impl PoEncryptionKey {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let secret = StaticSecret::random_from_rng(rng);
        let public = PublicKey::from(&secret);
        PoEncryptionKey { secret, public }
    }

    pub fn public(&self) -> [u8; 32] {
        self.public.to_bytes()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReservationPlaintext {
    pub pk_d: [u8; EPHEMERAL_PK_LEN],
    pub t_s: u64,
    pub t_p: u64,
}

impl ReservationPlaintext {
    fn to_bytes(self) -> [u8; PLAINTEXT_LEN] {
        let mut out = [0u8; PLAINTEXT_LEN];
        out[..32].copy_from_slice(&self.pk_d);
        out[32..40].copy_from_slice(&self.t_s.to_be_bytes());
        out[40..].copy_from_slice(&self.t_p.to_be_bytes());
        out
    }

    fn from_bytes(b: &[u8]) -> Option<Self> {
        if b.len() != PLAINTEXT_LEN {
            return None;
        }
        Some(ReservationPlaintext {
            pk_d: b[..32].try_into().ok()?,
            t_s: u64::from_be_bytes(b[32..40].try_into().ok()?),
            t_p: u64::from_be_bytes(b[40..].try_into().ok()?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReservationCiphertext(pub Vec<u8>);

impl ReservationCiphertext {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

fn aead(eph_pub: &[u8; 32], po_pub: &[u8; 32], shared: &[u8; 32]) -> ChaCha20Poly1305 {
    let key = ops::hash_parts(KDF_DOMAIN, &[eph_pub, po_pub, shared]);
    ChaCha20Poly1305::new(&key.into())
}

pub fn reservation_encrypt<R: RngCore + CryptoRng>(
    po_public: &[u8; 32],
    plaintext: &ReservationPlaintext,
    rng: &mut R,
) -> ReservationCiphertext {
    let eph = StaticSecret::random_from_rng(rng);
    let eph_pub = PublicKey::from(&eph).to_bytes();
    ops::ec_mul();
    let shared = eph.diffie_hellman(&PublicKey::from(*po_public));
    ops::ec_mul();
    let sealed = aead(&eph_pub, po_public, shared.as_bytes())
        .encrypt(&Nonce::default(), plaintext.to_bytes().as_slice())
        .expect("ChaCha20-Poly1305 encryption of a short buffer cannot fail");
    let mut out = Vec::with_capacity(RESERVATION_CIPHERTEXT_LEN);
    out.extend(eph_pub);
    out.extend(sealed);
    ReservationCiphertext(out)
}

pub fn reservation_decrypt(
    key: &PoEncryptionKey,
    ct: &ReservationCiphertext,
) -> Result<ReservationPlaintext, CredentialError> {
    let (eph_pub, sealed) = ct.0.split_first_chunk::<32>().ok_or(CredentialError::Decryption)?;
    let shared = key.secret.diffie_hellman(&PublicKey::from(*eph_pub));
    let opened = aead(eph_pub, &key.public(), shared.as_bytes())
        .decrypt(&Nonce::default(), sealed)
        .map_err(|_| CredentialError::Decryption)?;
    ReservationPlaintext::from_bytes(&opened).ok_or(CredentialError::Decryption)
}
