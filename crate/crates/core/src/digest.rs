//! 256-bit digests and the length-prefixed field hashing used everywhere a
//! concatenation `a || b || ...` is hashed.

use std::fmt;

use serde::{Serialize, Serializer};
use sha2::{Digest as _, Sha256};

pub const DIGEST_LEN: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Digest(pub [u8; DIGEST_LEN]);

impl Digest {
    /// The back-link of the first block.
    pub const GENESIS: Digest = Digest([0u8; DIGEST_LEN]);

    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Digest> {
        bytes.try_into().ok().map(Digest)
    }

    /// Number of leading zero bits, used for proof-of-work targets.
    pub fn leading_zero_bits(&self) -> u32 {
        let mut bits = 0;
        for b in self.0 {
            if b == 0 {
                bits += 8;
            } else {
                bits += b.leading_zeros();
                break;
            }
        }
        bits
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

/// Hash identifier recorded in the ledger parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HashId {
    Sha256,
}

impl HashId {
    pub fn tag(self) -> u8 {
        match self {
            HashId::Sha256 => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<HashId> {
        (tag == 1).then_some(HashId::Sha256)
    }
}

/// Plain SHA-256 of a byte string.
pub fn hash(bytes: &[u8]) -> Digest {
    Digest(Sha256::digest(bytes).into())
}

/// Hashes a sequence of fields, each prefixed by its 4-byte big-endian length,
/// so that no two distinct field sequences share a preimage.
#[derive(Clone, Default)]
pub struct FieldHasher {
    inner: Sha256,
}

impl FieldHasher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(&mut self, bytes: &[u8]) -> &mut Self {
        let len = u32::try_from(bytes.len()).expect("hashed field exceeds 4 GiB");
        self.inner.update(len.to_be_bytes());
        self.inner.update(bytes);
        self
    }

    pub fn finish(&self) -> Digest {
        Digest(self.inner.clone().finalize().into())
    }
}
