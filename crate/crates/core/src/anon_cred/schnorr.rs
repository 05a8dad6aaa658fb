//! Non-interactive Schnorr proofs of discrete-log knowledge in G1.
//!
//! The same transcript doubles as a Schnorr signature when the message is
//! folded into the context, which is how the driver's `η` is produced.

use rand::{CryptoRng, RngCore};

use super::{ops, CredentialError, Pairing};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchnorrProof<P: Pairing> {
    pub commitment: P::G1,
    pub response: P::Scalar,
}

fn challenge<P: Pairing>(base: &P::G1, public: &P::G1, commitment: &P::G1, context: &[u8]) -> P::Scalar {
    ops::hash_to_scalar::<P>(
        b"parkpir/schnorr",
        &[&P::encode_g1(base), &P::encode_g1(public), &P::encode_g1(commitment), context],
    )
}

impl<P: Pairing> SchnorrProof<P> {
    /// Proves knowledge of `secret` with `public = base^secret`.
    pub fn prove<R: RngCore + CryptoRng>(
        base: &P::G1,
        secret: &P::Scalar,
        public: &P::G1,
        context: &[u8],
        rng: &mut R,
    ) -> Self {
        let w = P::random_scalar(rng);
        let commitment = ops::g1_exp::<P>(base, &w);
        let c = challenge::<P>(base, public, &commitment, context);
        let response = ops::add::<P>(&w, &ops::mul::<P>(&c, secret));
        SchnorrProof { commitment, response }
    }

    /// Checks `base^response == commitment · public^challenge`.
    pub fn verify(&self, base: &P::G1, public: &P::G1, context: &[u8]) -> Result<(), CredentialError> {
        let c = challenge::<P>(base, public, &self.commitment, context);
        let lhs = ops::g1_exp::<P>(base, &self.response);
        let rhs = ops::g1_op::<P>(&self.commitment, &ops::g1_exp::<P>(public, &c));
        if lhs == rhs {
            Ok(())
        } else {
            Err(CredentialError::InvalidProof)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anon_cred::ToyPairing;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    type T = ToyPairing;

    #[test]
    fn completeness_and_soundness_vectors() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let g = T::g1_generator();
        let x = T::random_scalar(&mut rng);
        let pubk = T::g1_exp(&g, &x);
        let proof = SchnorrProof::<T>::prove(&g, &x, &pubk, b"ctx", &mut rng);
        assert!(proof.verify(&g, &pubk, b"ctx").is_ok());
        assert!(proof.verify(&g, &pubk, b"other").is_err());

        let wrong = T::scalar_add(&x, &T::scalar_from_u64(1));
        let bad = SchnorrProof::<T>::prove(&g, &wrong, &pubk, b"ctx", &mut rng);
        assert_eq!(bad.verify(&g, &pubk, b"ctx"), Err(CredentialError::InvalidProof));
    }
}
