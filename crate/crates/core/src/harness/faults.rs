use rand::Rng;

use crate::field_rs::{FieldElement, MODULUS};
use crate::pir::{PirResponse, ResponseBody};

/// Replaces every symbol with an independent uniform field element.
pub fn byzantine_wrap<R: Rng + ?Sized>(response: PirResponse, rng: &mut R) -> PirResponse {
    let body = match response.body {
        ResponseBody::Values(v) => {
            ResponseBody::Values(v.iter().map(|_| FieldElement::new(rng.gen_range(0..MODULUS))).collect())
        }
        ResponseBody::Timeout => ResponseBody::Timeout,
    };
    PirResponse { body, ..response }
}
