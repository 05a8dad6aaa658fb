//! Anonymous driver credentials: KDC setup, registration, randomizable
//! short signatures, the reservation ciphertext and ephemeral challenge
//! keys.

mod bls;
mod codec;
mod credential;
mod ephemeral;
pub mod ops;
mod pairing;
mod reservation;
mod schnorr;
mod toy;

pub use bls::Bls12;
pub use credential::{
    driver_register, kdc_setup, randomized_sign, verification_value, verify_sig, DriverCredential, DriverKeys,
    GroupParams, GroupPublicKey, IssuedCredential, KdcKeys, RandomizedSig, RegistrationRequest, TrackingEntry,
};
pub use ephemeral::{challenge_sign, challenge_verify, EphemeralKeypair, EPHEMERAL_PK_LEN};
pub use ops::{measure, OpCounts};
pub use pairing::Pairing;
pub use reservation::{
    reservation_decrypt, reservation_encrypt, PoEncryptionKey, ReservationCiphertext, ReservationPlaintext,
    RESERVATION_CIPHERTEXT_LEN,
};
pub use schnorr::SchnorrProof;
pub use toy::{ToyG1, ToyG2, ToyGt, ToyPairing, ToyScalar, TOY_ORDER};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CredentialError {
    #[error("registration pairing check e(γ, Ỹ) = e(g1, γ̃) failed")]
    PairingCheck,
    #[error("η does not verify under the driver's long-term key")]
    BadEta,
    #[error("proof of knowledge rejected")]
    InvalidProof,
    #[error("identity {0:?} is already registered")]
    DuplicateId(String),
    #[error("σ′1 is the identity")]
    IdentitySignature,
    #[error("signature hash mismatch")]
    InvalidSignature,
    #[error("reservation ciphertext failed authentication")]
    Decryption,
    #[error("challenge signature rejected")]
    ChallengeSignature,
    #[error("malformed encoding: {0}")]
    Malformed(&'static str),
}
