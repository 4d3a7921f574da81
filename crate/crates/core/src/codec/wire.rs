//! Byte-level reader and writer. All integers are big-endian; variable-length
//! fields carry a 4-byte length prefix.

use crate::bilinear::{BilinearError, BilinearGroup};
use crate::digest::{Digest, DIGEST_LEN};

use super::CodecError;

#[derive(Debug, Default)]
pub(crate) struct Writer {
    pub(crate) buf: Vec<u8>,
}

impl Writer {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub(crate) fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub(crate) fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub(crate) fn len(&mut self, n: usize) -> &mut Self {
        self.u32(u32::try_from(n).expect("field longer than 4 GiB"))
    }

    /// Fixed-width bytes, no prefix.
    pub(crate) fn raw(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(bytes);
        self
    }

    /// Length-prefixed bytes.
    pub(crate) fn bytes(&mut self, bytes: &[u8]) -> &mut Self {
        self.len(bytes.len()).raw(bytes)
    }

    pub(crate) fn digest(&mut self, d: &Digest) -> &mut Self {
        self.raw(d.as_bytes())
    }

    pub(crate) fn opt_str(&mut self, s: Option<&str>) -> &mut Self {
        match s {
            None => self.u8(0),
            Some(s) => self.u8(1).bytes(s.as_bytes()),
        }
    }

    pub(crate) fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub(crate) struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
    /// Offset of `data[0]` within the enclosing file, for error messages.
    base: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(data: &'a [u8]) -> Self {
        Reader { data, pos: 0, base: 0 }
    }

    pub(crate) fn offset(&self) -> usize {
        self.base + self.pos
    }

    pub(crate) fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.pos == self.data.len()
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        let available = self.data.len() - self.pos;
        if n > available {
            return Err(CodecError::Truncated {
                offset: self.offset(),
                needed: n,
                available,
            });
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    /// A reader over the next `n` bytes that reports offsets in file terms.
    pub(crate) fn sub(&mut self, n: usize) -> Result<Reader<'a>, CodecError> {
        let base = self.offset();
        let data = self.take(n)?;
        Ok(Reader { data, pos: 0, base })
    }

    pub(crate) fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub(crate) fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub(crate) fn bytes(&mut self) -> Result<&'a [u8], CodecError> {
        let n = self.u32()? as usize;
        self.take(n)
    }

    pub(crate) fn digest(&mut self) -> Result<Digest, CodecError> {
        Ok(Digest(self.take(DIGEST_LEN)?.try_into().expect("32 bytes")))
    }

    pub(crate) fn array32(&mut self) -> Result<[u8; 32], CodecError> {
        Ok(self.take(32)?.try_into().expect("32 bytes"))
    }

    pub(crate) fn string(&mut self) -> Result<String, CodecError> {
        let at = self.offset();
        let raw = self.bytes()?;
        String::from_utf8(raw.to_vec()).map_err(|_| CodecError::Invalid {
            offset: at,
            reason: "string is not UTF-8".into(),
        })
    }

    pub(crate) fn opt_str(&mut self) -> Result<Option<String>, CodecError> {
        let at = self.offset();
        match self.u8()? {
            0 => Ok(None),
            1 => self.string().map(Some),
            tag => Err(CodecError::BadTag {
                offset: at,
                what: "optional string",
                tag,
            }),
        }
    }

    fn element<T>(
        &mut self,
        width: usize,
        decode: impl FnOnce(&[u8]) -> Result<T, BilinearError>,
    ) -> Result<T, CodecError> {
        let offset = self.offset();
        let raw = self.take(width)?;
        decode(raw).map_err(|source| CodecError::Element { offset, source })
    }

    pub(crate) fn scalar<B: BilinearGroup>(&mut self) -> Result<B::Scalar, CodecError> {
        self.element(B::description().scalar_width, B::decode_scalar)
    }

    pub(crate) fn g1<B: BilinearGroup>(&mut self) -> Result<B::G1, CodecError> {
        self.element(B::description().g1_width, B::decode_g1)
    }

    pub(crate) fn g2<B: BilinearGroup>(&mut self) -> Result<B::G2, CodecError> {
        self.element(B::description().g2_width, B::decode_g2)
    }

    pub(crate) fn gt<B: BilinearGroup>(&mut self) -> Result<B::Gt, CodecError> {
        self.element(B::description().gt_width, B::decode_gt)
    }

    pub(crate) fn finish(self) -> Result<(), CodecError> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(CodecError::TrailingBytes {
                offset: self.offset(),
                count: self.data.len() - self.pos,
            })
        }
    }
}
