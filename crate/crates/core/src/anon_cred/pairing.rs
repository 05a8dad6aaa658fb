use std::fmt::Debug;

use rand::{CryptoRng, RngCore};

/// A bilinear group `e: G1 × G2 → GT` of prime order.
///
/// Groups are written multiplicatively in the method names (`*_exp` is
/// exponentiation, `*_op` the group law) to match how the protocol is
/// usually stated, whatever notation the backend uses internally.
pub trait Pairing: Debug + Clone + Copy + PartialEq + Eq + 'static {
    const NAME: &'static str;

    type Scalar: Copy + Eq + Debug;
    type G1: Copy + Eq + Debug;
    type G2: Copy + Eq + Debug;
    type Gt: Copy + Eq + Debug;

    fn g1_generator() -> Self::G1;
    fn g2_generator() -> Self::G2;

    fn random_scalar<R: RngCore + CryptoRng>(rng: &mut R) -> Self::Scalar;
    fn scalar_from_u64(v: u64) -> Self::Scalar;
    /// Reduces a 256-bit digest into the scalar field.
    fn scalar_from_digest(digest: &[u8; 32]) -> Self::Scalar;
    fn scalar_add(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_mul(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_neg(a: &Self::Scalar) -> Self::Scalar;

    fn g1_exp(base: &Self::G1, e: &Self::Scalar) -> Self::G1;
    fn g1_op(a: &Self::G1, b: &Self::G1) -> Self::G1;
    fn g1_is_identity(a: &Self::G1) -> bool;

    fn g2_exp(base: &Self::G2, e: &Self::Scalar) -> Self::G2;
    fn g2_op(a: &Self::G2, b: &Self::G2) -> Self::G2;

    fn gt_exp(base: &Self::Gt, e: &Self::Scalar) -> Self::Gt;
    fn gt_op(a: &Self::Gt, b: &Self::Gt) -> Self::Gt;
    fn gt_is_identity(a: &Self::Gt) -> bool;

    fn pair(a: &Self::G1, b: &Self::G2) -> Self::Gt;

    fn encode_scalar(a: &Self::Scalar) -> Vec<u8>;
    fn decode_scalar(bytes: &[u8]) -> Option<Self::Scalar>;
    fn encode_g1(a: &Self::G1) -> Vec<u8>;
    fn decode_g1(bytes: &[u8]) -> Option<Self::G1>;
    fn encode_g2(a: &Self::G2) -> Vec<u8>;
    fn decode_g2(bytes: &[u8]) -> Option<Self::G2>;
    /// Canonical bytes of a target-group element; only ever hashed.
    fn encode_gt(a: &Self::Gt) -> Vec<u8>;
}
