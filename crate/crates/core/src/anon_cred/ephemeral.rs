//! Fresh per-reservation Ed25519 keys `(PK_D, SK_D)` answering the PO's
//! arrival challenge `Γ`.

use ed25519_dalek::{Signature, Signer, SigningKey, VerifyingKey};
use rand::{CryptoRng, RngCore};

use super::CredentialError;

pub const EPHEMERAL_PK_LEN: usize = 32;

#[derive(Debug, Clone)]
pub struct EphemeralKeypair {
    signing: SigningKey,
}

impl EphemeralKeypair {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        EphemeralKeypair { signing: SigningKey::generate(rng) }
    }

    pub fn public(&self) -> VerifyingKey {
        self.signing.verifying_key()
    }

    pub fn public_bytes(&self) -> [u8; EPHEMERAL_PK_LEN] {
        self.public().to_bytes()
    }

    pub fn secret(&self) -> &SigningKey {
        &self.signing
    }
}

pub fn challenge_sign(sk: &SigningKey, challenge: &[u8]) -> Signature {
    sk.sign(challenge)
}

pub fn challenge_verify(pk: &[u8; EPHEMERAL_PK_LEN], challenge: &[u8], sig: &Signature) -> Result<(), CredentialError> {
    let pk = VerifyingKey::from_bytes(pk).map_err(|_| CredentialError::Malformed("ephemeral public key"))?;
    pk.verify_strict(challenge, sig).map_err(|_| CredentialError::ChallengeSignature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn challenge_round_trip_and_rejections() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let d1 = EphemeralKeypair::generate(&mut rng);
        let d2 = EphemeralKeypair::generate(&mut rng);
        let gamma = [0x5a; 32];
        let sig = challenge_sign(d1.secret(), &gamma);
        assert!(challenge_verify(&d1.public_bytes(), &gamma, &sig).is_ok());
        assert_eq!(challenge_verify(&d1.public_bytes(), &[0x5b; 32], &sig), Err(CredentialError::ChallengeSignature));
        assert_eq!(challenge_verify(&d2.public_bytes(), &gamma, &sig), Err(CredentialError::ChallengeSignature));
        assert_ne!(d1.public_bytes(), d2.public_bytes());
    }
}
