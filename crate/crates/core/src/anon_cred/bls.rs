//! BLS12-381 (asymmetric, Type-3) backend.

use bls12_381::{pairing, G1Affine, G1Projective, G2Affine, G2Projective, Gt, Scalar};
use ff::Field;
use rand::{CryptoRng, RngCore};

use super::Pairing;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bls12;

impl Pairing for Bls12 {
    const NAME: &'static str = "bls12-381";

    type Scalar = Scalar;
    type G1 = G1Projective;
    type G2 = G2Projective;
    type Gt = Gt;

    fn g1_generator() -> G1Projective {
        G1Projective::generator()
    }

    fn g2_generator() -> G2Projective {
        G2Projective::generator()
    }

    fn random_scalar<R: RngCore + CryptoRng>(rng: &mut R) -> Scalar {
        Scalar::random(rng)
    }

    fn scalar_from_u64(v: u64) -> Scalar {
        Scalar::from(v)
    }

    fn scalar_from_digest(digest: &[u8; 32]) -> Scalar {
        // big-endian digest, little-endian wide reduction
        let mut wide = [0u8; 64];
        for (dst, src) in wide.iter_mut().zip(digest.iter().rev()) {
            *dst = *src;
        }
        Scalar::from_bytes_wide(&wide)
    }

    fn scalar_add(a: &Scalar, b: &Scalar) -> Scalar {
        a + b
    }

    fn scalar_mul(a: &Scalar, b: &Scalar) -> Scalar {
        a * b
    }

    fn scalar_neg(a: &Scalar) -> Scalar {
        -a
    }

    fn g1_exp(base: &G1Projective, e: &Scalar) -> G1Projective {
        base * e
    }

    fn g1_op(a: &G1Projective, b: &G1Projective) -> G1Projective {
        a + b
    }

    fn g1_is_identity(a: &G1Projective) -> bool {
        bool::from(a.is_identity())
    }

    fn g2_exp(base: &G2Projective, e: &Scalar) -> G2Projective {
        base * e
    }

    fn g2_op(a: &G2Projective, b: &G2Projective) -> G2Projective {
        a + b
    }

    fn gt_exp(base: &Gt, e: &Scalar) -> Gt {
        base * e
    }

    fn gt_op(a: &Gt, b: &Gt) -> Gt {
        a + b
    }

    fn gt_is_identity(a: &Gt) -> bool {
        *a == Gt::identity()
    }

    fn pair(a: &G1Projective, b: &G2Projective) -> Gt {
        pairing(&G1Affine::from(a), &G2Affine::from(b))
    }

    fn encode_scalar(a: &Scalar) -> Vec<u8> {
        a.to_bytes().to_vec()
    }

    fn decode_scalar(bytes: &[u8]) -> Option<Scalar> {
        Option::from(Scalar::from_bytes(bytes.try_into().ok()?))
    }

    fn encode_g1(a: &G1Projective) -> Vec<u8> {
        G1Affine::from(a).to_compressed().to_vec()
    }

    fn decode_g1(bytes: &[u8]) -> Option<G1Projective> {
        let arr: [u8; 48] = bytes.try_into().ok()?;
        Option::<G1Affine>::from(G1Affine::from_compressed(&arr)).map(G1Projective::from)
    }

    fn encode_g2(a: &G2Projective) -> Vec<u8> {
        G2Affine::from(a).to_compressed().to_vec()
    }

    fn decode_g2(bytes: &[u8]) -> Option<G2Projective> {
        let arr: [u8; 96] = bytes.try_into().ok()?;
        Option::<G2Affine>::from(G2Affine::from_compressed(&arr)).map(G2Projective::from)
    }

    fn encode_gt(a: &Gt) -> Vec<u8> {
        // The crate exposes no byte encoding for GT. Its Debug output lists
        // the twelve reduced Fp coefficients as fixed-width big-endian hex,
        // which is canonical.
        let text = format!("{a:?}");
        let mut out = Vec::with_capacity(12 * 48);
        for chunk in text.split("0x").skip(1) {
            let hex_digits: String = chunk.chars().take_while(char::is_ascii_hexdigit).collect();
            out.extend(hex::decode(hex_digits).expect("Debug prints even-length hex"));
        }
        debug_assert_eq!(out.len(), 12 * 48);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn gt_encoding_is_576_bytes_and_injective_on_samples() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let g = Bls12::pair(&Bls12::g1_generator(), &Bls12::g2_generator());
        let a = Bls12::gt_exp(&g, &Bls12::random_scalar(&mut rng));
        let b = Bls12::gt_exp(&g, &Bls12::random_scalar(&mut rng));
        assert_eq!(Bls12::encode_gt(&a).len(), 576);
        assert_ne!(Bls12::encode_gt(&a), Bls12::encode_gt(&b));
        assert_eq!(Bls12::encode_gt(&a), Bls12::encode_gt(&(a + Gt::identity())));
    }

    #[test]
    fn digest_reduction_is_big_endian() {
        let mut d = [0u8; 32];
        d[31] = 7;
        assert_eq!(Bls12::scalar_from_digest(&d), Scalar::from(7u64));
    }

    #[test]
    fn point_encodings_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let s = Bls12::random_scalar(&mut rng);
        let p = Bls12::g1_exp(&Bls12::g1_generator(), &s);
        let q = Bls12::g2_exp(&Bls12::g2_generator(), &s);
        assert_eq!(Bls12::decode_g1(&Bls12::encode_g1(&p)), Some(p));
        assert_eq!(Bls12::decode_g2(&Bls12::encode_g2(&q)), Some(q));
        assert_eq!(Bls12::decode_scalar(&Bls12::encode_scalar(&s)), Some(s));
        assert_eq!(Bls12::decode_g1(&[0u8; 47]), None);
    }
}
