//! Per-thread operation counters for the credential primitives.

use std::cell::Cell;
use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::Pairing;

/// Counts of the cryptographic primitives executed inside [`measure`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCounts {
    /// Exponentiations in G1, G2 or GT.
    pub exp: u32,
    pub pairing: u32,
    pub hash: u32,
    /// Scalar-field multiplications.
    pub mul: u32,
    /// Scalar-field additions.
    pub add: u32,
    /// Group-law applications in G1, G2 or GT.
    pub group_op: u32,
    /// Curve25519 scalar multiplications of the reservation ciphertext.
    pub ec_mul: u32,
}

impl std::ops::Add for OpCounts {
    type Output = OpCounts;
    fn add(self, o: OpCounts) -> OpCounts {
        OpCounts {
            exp: self.exp + o.exp,
            pairing: self.pairing + o.pairing,
            hash: self.hash + o.hash,
            mul: self.mul + o.mul,
            add: self.add + o.add,
            group_op: self.group_op + o.group_op,
            ec_mul: self.ec_mul + o.ec_mul,
        }
    }
}

impl fmt::Display for OpCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "exp={} pairing={} hash={} mul={} add={} group_op={} ec_mul={}",
            self.exp, self.pairing, self.hash, self.mul, self.add, self.group_op, self.ec_mul
        )
    }
}

thread_local! {
    static COUNTS: Cell<OpCounts> = Cell::new(OpCounts::default());
}

fn bump(f: impl FnOnce(&mut OpCounts)) {
    COUNTS.with(|c| {
        let mut v = c.get();
        f(&mut v);
        c.set(v);
    });
}

/// Runs `f` and returns the operations it executed on this thread.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, OpCounts) {
    let before = COUNTS.with(Cell::get);
    COUNTS.with(|c| c.set(OpCounts::default()));
    let out = f();
    let during = COUNTS.with(Cell::get);
    COUNTS.with(|c| c.set(before + during));
    (out, during)
}

pub(crate) fn g1_exp<P: Pairing>(b: &P::G1, e: &P::Scalar) -> P::G1 {
    bump(|c| c.exp += 1);
    P::g1_exp(b, e)
}

pub(crate) fn g2_exp<P: Pairing>(b: &P::G2, e: &P::Scalar) -> P::G2 {
    bump(|c| c.exp += 1);
    P::g2_exp(b, e)
}

pub(crate) fn gt_exp<P: Pairing>(b: &P::Gt, e: &P::Scalar) -> P::Gt {
    bump(|c| c.exp += 1);
    P::gt_exp(b, e)
}

pub(crate) fn g1_op<P: Pairing>(a: &P::G1, b: &P::G1) -> P::G1 {
    bump(|c| c.group_op += 1);
    P::g1_op(a, b)
}

pub(crate) fn g2_op<P: Pairing>(a: &P::G2, b: &P::G2) -> P::G2 {
    bump(|c| c.group_op += 1);
    P::g2_op(a, b)
}

pub(crate) fn gt_op<P: Pairing>(a: &P::Gt, b: &P::Gt) -> P::Gt {
    bump(|c| c.group_op += 1);
    P::gt_op(a, b)
}

pub(crate) fn pair<P: Pairing>(a: &P::G1, b: &P::G2) -> P::Gt {
    bump(|c| c.pairing += 1);
    P::pair(a, b)
}

pub(crate) fn mul<P: Pairing>(a: &P::Scalar, b: &P::Scalar) -> P::Scalar {
    bump(|c| c.mul += 1);
    P::scalar_mul(a, b)
}

pub(crate) fn add<P: Pairing>(a: &P::Scalar, b: &P::Scalar) -> P::Scalar {
    bump(|c| c.add += 1);
    P::scalar_add(a, b)
}

pub(crate) fn ec_mul() {
    bump(|c| c.ec_mul += 1);
}

/// SHA-256 over length-prefixed parts.
pub(crate) fn hash_parts(domain: &[u8], parts: &[&[u8]]) -> [u8; 32] {
    bump(|c| c.hash += 1);
    let mut h = Sha256::new();
    h.update((domain.len() as u32).to_be_bytes());
    h.update(domain);
    for p in parts {
        h.update((p.len() as u32).to_be_bytes());
        h.update(p);
    }
    h.finalize().into()
}

/// The random oracle `H` into the scalar field.
pub(crate) fn hash_to_scalar<P: Pairing>(domain: &[u8], parts: &[&[u8]]) -> P::Scalar {
    P::scalar_from_digest(&hash_parts(domain, parts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_is_scoped_and_nests() {
        let ((), outer) = measure(|| {
            bump(|c| c.hash += 1);
            let ((), inner) = measure(|| bump(|c| c.exp += 2));
            assert_eq!(inner.exp, 2);
            assert_eq!(inner.hash, 0);
        });
        assert_eq!(outer.hash, 1);
        assert_eq!(outer.exp, 2);
    }
}
