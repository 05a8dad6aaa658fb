//! Insecure exponent-arithmetic pairing for fast exhaustive tests.
//!
//! Every group element is stored as its discrete logarithm modulo the
//! Mersenne prime `q = 2^61 - 1`; the pairing multiplies logarithms. It is
//! bilinear and non-degenerate, and offers no security whatsoever.

use rand::{CryptoRng, Rng, RngCore};

use super::Pairing;

pub const TOY_ORDER: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % TOY_ORDER as u128) as u64
}

fn addmod(a: u64, b: u64) -> u64 {
    (a + b) % TOY_ORDER
}

macro_rules! toy_element {
    ($name:ident) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub struct $name(u64);

        impl $name {
            pub fn encode(&self) -> Vec<u8> {
                self.0.to_be_bytes().to_vec()
            }

            pub fn decode(bytes: &[u8]) -> Option<Self> {
                let v = u64::from_be_bytes(bytes.try_into().ok()?);
                (v < TOY_ORDER).then_some($name(v))
            }
        }
    };
}

toy_element!(ToyScalar);
toy_element!(ToyG1);
toy_element!(ToyG2);
toy_element!(ToyGt);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToyPairing;

impl Pairing for ToyPairing {
    const NAME: &'static str = "toy";

    type Scalar = ToyScalar;
    type G1 = ToyG1;
    type G2 = ToyG2;
    type Gt = ToyGt;

    fn g1_generator() -> ToyG1 {
        ToyG1(1)
    }

    fn g2_generator() -> ToyG2 {
        ToyG2(1)
    }

    fn random_scalar<R: RngCore + CryptoRng>(rng: &mut R) -> ToyScalar {
        ToyScalar(rng.gen_range(0..TOY_ORDER))
    }

    fn scalar_from_u64(v: u64) -> ToyScalar {
        ToyScalar(v % TOY_ORDER)
    }

    fn scalar_from_digest(digest: &[u8; 32]) -> ToyScalar {
        let v = digest.iter().fold(0u128, |acc, &b| ((acc << 8) | b as u128) % TOY_ORDER as u128);
        ToyScalar(v as u64)
    }

    fn scalar_add(a: &ToyScalar, b: &ToyScalar) -> ToyScalar {
        ToyScalar(addmod(a.0, b.0))
    }

    fn scalar_mul(a: &ToyScalar, b: &ToyScalar) -> ToyScalar {
        ToyScalar(mulmod(a.0, b.0))
    }

    fn scalar_neg(a: &ToyScalar) -> ToyScalar {
        ToyScalar((TOY_ORDER - a.0) % TOY_ORDER)
    }

    fn g1_exp(base: &ToyG1, e: &ToyScalar) -> ToyG1 {
        ToyG1(mulmod(base.0, e.0))
    }

    fn g1_op(a: &ToyG1, b: &ToyG1) -> ToyG1 {
        ToyG1(addmod(a.0, b.0))
    }

    fn g1_is_identity(a: &ToyG1) -> bool {
        a.0 == 0
    }

    fn g2_exp(base: &ToyG2, e: &ToyScalar) -> ToyG2 {
        ToyG2(mulmod(base.0, e.0))
    }

    fn g2_op(a: &ToyG2, b: &ToyG2) -> ToyG2 {
        ToyG2(addmod(a.0, b.0))
    }

    fn gt_exp(base: &ToyGt, e: &ToyScalar) -> ToyGt {
        ToyGt(mulmod(base.0, e.0))
    }

    fn gt_op(a: &ToyGt, b: &ToyGt) -> ToyGt {
        ToyGt(addmod(a.0, b.0))
    }

    fn gt_is_identity(a: &ToyGt) -> bool {
        a.0 == 0
    }

    fn pair(a: &ToyG1, b: &ToyG2) -> ToyGt {
        ToyGt(mulmod(a.0, b.0))
    }

    fn encode_scalar(a: &ToyScalar) -> Vec<u8> {
        a.encode()
    }

    fn decode_scalar(bytes: &[u8]) -> Option<ToyScalar> {
        ToyScalar::decode(bytes)
    }

    fn encode_g1(a: &ToyG1) -> Vec<u8> {
        a.encode()
    }

    fn decode_g1(bytes: &[u8]) -> Option<ToyG1> {
        ToyG1::decode(bytes)
    }

    fn encode_g2(a: &ToyG2) -> Vec<u8> {
        a.encode()
    }

    fn decode_g2(bytes: &[u8]) -> Option<ToyG2> {
        ToyG2::decode(bytes)
    }

    fn encode_gt(a: &ToyGt) -> Vec<u8> {
        a.encode()
    }
}
