//! Length-prefixed concatenation of element encodings (u16 big-endian
//! length before each part).

use super::{CredentialError, Pairing};

#[derive(Default)]
pub(crate) struct Writer(Vec<u8>);

impl Writer {
    pub(crate) fn bytes(&mut self, part: &[u8]) {
        let len = u16::try_from(part.len()).expect("part exceeds u16 length prefix");
        self.0.extend(len.to_be_bytes());
        self.0.extend(part);
    }

    pub(crate) fn finish(self) -> Vec<u8> {
        self.0
    }
}

pub(crate) struct Reader<'a>(&'a [u8]);

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Reader(bytes)
    }

    pub(crate) fn bytes(&mut self) -> Result<&'a [u8], CredentialError> {
        let short = CredentialError::Malformed("truncated");
        let (len, rest) = self.0.split_first_chunk::<2>().ok_or(short.clone())?;
        let len = u16::from_be_bytes(*len) as usize;
        if rest.len() < len {
            return Err(short);
        }
        let (part, rest) = rest.split_at(len);
        self.0 = rest;
        Ok(part)
    }

    pub(crate) fn g1<P: Pairing>(&mut self) -> Result<P::G1, CredentialError> {
        P::decode_g1(self.bytes()?).ok_or(CredentialError::Malformed("G1 element"))
    }

    pub(crate) fn g2<P: Pairing>(&mut self) -> Result<P::G2, CredentialError> {
        P::decode_g2(self.bytes()?).ok_or(CredentialError::Malformed("G2 element"))
    }

    pub(crate) fn scalar<P: Pairing>(&mut self) -> Result<P::Scalar, CredentialError> {
        P::decode_scalar(self.bytes()?).ok_or(CredentialError::Malformed("scalar"))
    }

    pub(crate) fn end(self) -> Result<(), CredentialError> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(CredentialError::Malformed("trailing bytes"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_truncation() {
        let mut w = Writer::default();
        w.bytes(b"abc");
        w.bytes(b"");
        let buf = w.finish();
        assert_eq!(buf, [0, 3, b'a', b'b', b'c', 0, 0]);
        let mut r = Reader::new(&buf);
        assert_eq!(r.bytes().unwrap(), b"abc");
        assert_eq!(r.bytes().unwrap(), b"");
        assert!(r.end().is_ok());
        assert!(Reader::new(&buf[..4]).bytes().is_err());
    }
}
