use ark_serialize::{CanonicalDeserialize, CanonicalSerialize, Compress, Validate};
use thiserror::Error;

use super::FORMAT_VERSION;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("unexpected end of input")]
    Truncated,
    #[error("bad magic: expected {expected:?}")]
    Magic { expected: String },
    #[error("unsupported format version {0}")]
    Version(u8),
    #[error("malformed group or field element")]
    Element,
    #[error("{0} trailing bytes")]
    Trailing(usize),
    #[error("length {0} exceeds the remaining input")]
    Length(u64),
    #[error("{0}")]
    Invalid(String),
}

/// Append-only binary writer with length-prefixed sequences.
#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    /// Starts an artifact with its magic tag and the format version.
    pub fn with_header(magic: &[u8; 4]) -> Self {
        let mut w = Writer::default();
        w.buf.extend_from_slice(magic);
        w.u8(FORMAT_VERSION);
        w
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn bytes(&mut self, b: &[u8]) {
        self.u64(b.len() as u64);
        self.buf.extend_from_slice(b);
    }

    pub fn elem<T: CanonicalSerialize>(&mut self, v: &T) {
        v.serialize_compressed(&mut self.buf).expect("in-memory serialization");
    }

    pub fn elems<T: CanonicalSerialize>(&mut self, vs: &[T]) {
        self.u64(vs.len() as u64);
        for v in vs {
            self.elem(v);
        }
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn with_header(buf: &'a [u8], magic: &[u8; 4]) -> Result<Self, CodecError> {
        let mut r = Reader::new(buf);
        if r.take(4)? != magic {
            return Err(CodecError::Magic { expected: String::from_utf8_lossy(magic).into_owned() });
        }
        match r.u8()? {
            FORMAT_VERSION => Ok(r),
            v => Err(CodecError::Version(v)),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        let end = self.pos.checked_add(n).ok_or(CodecError::Truncated)?;
        let out = self.buf.get(self.pos..end).ok_or(CodecError::Truncated)?;
        self.pos = end;
        Ok(out)
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    /// A length prefix that cannot exceed the remaining input when each item is at least `min_item` bytes.
    pub fn len(&mut self, min_item: usize) -> Result<usize, CodecError> {
        let n = self.u64()?;
        if n.saturating_mul(min_item.max(1) as u64) > self.remaining() as u64 {
            return Err(CodecError::Length(n));
        }
        Ok(n as usize)
    }

    pub fn bytes(&mut self) -> Result<&'a [u8], CodecError> {
        let n = self.len(1)?;
        self.take(n)
    }

    /// Deserializes a compressed element, checking curve and subgroup membership.
    pub fn elem<T: CanonicalDeserialize>(&mut self) -> Result<T, CodecError> {
        let mut rest = &self.buf[self.pos..];
        let before = rest.len();
        let v = T::deserialize_with_mode(&mut rest, Compress::Yes, Validate::Yes).map_err(|_| CodecError::Element)?;
        self.pos += before - rest.len();
        Ok(v)
    }

    pub fn elems<T: CanonicalDeserialize>(&mut self) -> Result<Vec<T>, CodecError> {
        let n = self.len(1)?;
        (0..n).map(|_| self.elem()).collect()
    }

    pub fn finish(self) -> Result<(), CodecError> {
        match self.remaining() {
            0 => Ok(()),
            n => Err(CodecError::Trailing(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::{Fr, G1Affine};
    use ark_ec::AffineRepr;

    #[test]
    fn roundtrip_and_rejections() {
        let mut w = Writer::with_header(b"TEST");
        w.u64(7);
        w.elem(&Fr::from(5u64));
        w.elems(&[G1Affine::generator()]);
        let bytes = w.finish();
        let mut r = Reader::with_header(&bytes, b"TEST").unwrap();
        assert_eq!(r.u64().unwrap(), 7);
        assert_eq!(r.elem::<Fr>().unwrap(), Fr::from(5u64));
        assert_eq!(r.elems::<G1Affine>().unwrap(), vec![G1Affine::generator()]);
        r.finish().unwrap();

        assert!(Reader::with_header(&bytes, b"NOPE").is_err());
        let mut bad = bytes.clone();
        bad[4] = 99;
        assert!(matches!(Reader::with_header(&bad, b"TEST"), Err(CodecError::Version(99))));
        let mut r = Reader::with_header(&bytes[..bytes.len() - 3], b"TEST").unwrap();
        r.u64().unwrap();
        r.elem::<Fr>().unwrap();
        assert!(r.elems::<G1Affine>().is_err());
    }
}
