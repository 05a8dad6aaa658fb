//! Byte layout of PIR queries and responses.
//!
//! ```text
//! query    = node:u16 ‖ stripe:u16 ‖ elements
//! response = node:u16 ‖ stripe:u16 ‖ 0x00 ‖ elements
//!          | node:u16 ‖ stripe:u16 ‖ 0xFF                 (timeout record)
//! elements = word:u16 * len ‖ wrapped:u16 * w ‖ w:u16
//! ```
//!
//! All integers are big-endian. Each element travels as one 2-byte word.
//! The field has exactly one element, `2^16`, without a 2-byte form; it is
//! sent as word `0x0000` and its position is listed in the `wrapped`
//! trailer.

use super::{PirError, PirQuery, PirResponse, ResponseBody};
use crate::field_rs::FieldElement;

const VALUES: u8 = 0x00;
const TIMEOUT: u8 = 0xFF;

fn wire_err(msg: &str) -> PirError {
    PirError::Wire(msg.to_string())
}

fn put_elements(out: &mut Vec<u8>, elements: &[FieldElement]) -> Result<(), PirError> {
    if elements.len() > u16::MAX as usize {
        return Err(wire_err("too many elements"));
    }
    let mut wrapped = Vec::new();
    for (i, e) in elements.iter().enumerate() {
        match e.to_word() {
            Some(w) => out.extend_from_slice(&w),
            None => {
                out.extend_from_slice(&[0, 0]);
                wrapped.push(i as u16);
            }
        }
    }
    for i in &wrapped {
        out.extend_from_slice(&i.to_be_bytes());
    }
    out.extend_from_slice(&(wrapped.len() as u16).to_be_bytes());
    Ok(())
}

fn get_elements(bytes: &[u8]) -> Result<Vec<FieldElement>, PirError> {
    if bytes.len() < 2 || bytes.len() % 2 != 0 {
        return Err(wire_err("element block has odd or short length"));
    }
    let (body, w) = bytes.split_at(bytes.len() - 2);
    let w = u16::from_be_bytes([w[0], w[1]]) as usize;
    let words = body.len() / 2;
    let len = words.checked_sub(w).ok_or_else(|| wire_err("wrap trailer longer than body"))?;
    let (elems, trailer) = body.split_at(len * 2);
    let mut out: Vec<FieldElement> = elems
        .chunks_exact(2)
        .map(|c| FieldElement::from_word([c[0], c[1]]))
        .collect();
    for c in trailer.chunks_exact(2) {
        let i = u16::from_be_bytes([c[0], c[1]]) as usize;
        let slot = out.get_mut(i).ok_or_else(|| wire_err("wrapped index out of range"))?;
        if !slot.is_zero() {
            return Err(wire_err("wrapped position must carry word 0"));
        }
        *slot = FieldElement::new(1 << 16);
    }
    Ok(out)
}

fn header(bytes: &[u8]) -> Result<(u16, u16), PirError> {
    if bytes.len() < 4 {
        return Err(wire_err("truncated header"));
    }
    Ok((u16::from_be_bytes([bytes[0], bytes[1]]), u16::from_be_bytes([bytes[2], bytes[3]])))
}

pub fn encode_query(q: &PirQuery) -> Result<Vec<u8>, PirError> {
    let mut out = Vec::with_capacity(6 + 2 * q.entries.len());
    out.extend_from_slice(&q.node_index.to_be_bytes());
    out.extend_from_slice(&q.stripe_index.to_be_bytes());
    put_elements(&mut out, &q.entries)?;
    Ok(out)
}

pub fn decode_query(bytes: &[u8]) -> Result<PirQuery, PirError> {
    let (node_index, stripe_index) = header(bytes)?;
    Ok(PirQuery { node_index, stripe_index, entries: get_elements(&bytes[4..])? })
}

pub fn encode_response(r: &PirResponse) -> Result<Vec<u8>, PirError> {
    let mut out = Vec::new();
    out.extend_from_slice(&r.node_index.to_be_bytes());
    out.extend_from_slice(&r.stripe_index.to_be_bytes());
    match &r.body {
        ResponseBody::Values(v) => {
            out.push(VALUES);
            put_elements(&mut out, v)?;
        }
        ResponseBody::Timeout => out.push(TIMEOUT),
    }
    Ok(out)
}

pub fn decode_response(bytes: &[u8]) -> Result<PirResponse, PirError> {
    let (node_index, stripe_index) = header(bytes)?;
    let body = match bytes.get(4) {
        Some(&VALUES) => ResponseBody::Values(get_elements(&bytes[5..])?),
        Some(&TIMEOUT) if bytes.len() == 5 => ResponseBody::Timeout,
        _ => return Err(wire_err("unknown response kind")),
    };
    Ok(PirResponse { node_index, stripe_index, body })
}

/// Payload bytes of an element vector: two per element, framing excluded.
pub fn payload_bytes(elements: usize) -> usize {
    2 * elements
}
