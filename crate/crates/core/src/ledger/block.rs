//! Static-chain blocks and their digests.

use crate::bilinear::BilinearGroup;
use crate::codec;
use crate::digest::{hash, Digest, FieldHasher};
use crate::protocol::ShardEntry;

use super::warranty::Warranty;

/// A block carrying its encrypted shards inline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataBlock<B: BilinearGroup> {
    pub index: u64,
    pub entries: Vec<ShardEntry>,
    /// `c_b = e(ε_ī, k_{b,1})` at the time of publication.
    pub control: B::Gt,
    pub prev_hash: Digest,
    /// `d_b`
    pub digest: Digest,
    pub warranty: Warranty,
    pub owner: Option<String>,
    pub message_len: u64,
    /// `h(B_b)`: digest of the whole block record, linked by the next block.
    pub block_hash: Digest,
}

/// A block that keeps only a digest of its payload; the payload itself lives
/// off-ledger at `locator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShrunkBlock<B: BilinearGroup> {
    pub index: u64,
    /// `d_{b,0}`
    pub payload_digest: Digest,
    pub control: B::Gt,
    pub prev_hash: Digest,
    /// `d_{b,1}`
    pub digest: Digest,
    pub warranty: Warranty,
    pub owner: Option<String>,
    pub message_len: u64,
    pub locator: String,
    pub block_hash: Digest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block<B: BilinearGroup> {
    Full(DataBlock<B>),
    Shrunk(ShrunkBlock<B>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ChainVariant {
    Full,
    Shrunk,
}

impl ChainVariant {
    pub fn tag(self) -> u8 {
        match self {
            ChainVariant::Full => 1,
            ChainVariant::Shrunk => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(ChainVariant::Full),
            2 => Some(ChainVariant::Shrunk),
            _ => None,
        }
    }
}

macro_rules! common_field {
    ($self:ident, $f:ident) => {
        match $self {
            Block::Full(b) => &b.$f,
            Block::Shrunk(b) => &b.$f,
        }
    };
}

impl<B: BilinearGroup> Block<B> {
    pub fn variant(&self) -> ChainVariant {
        match self {
            Block::Full(_) => ChainVariant::Full,
            Block::Shrunk(_) => ChainVariant::Shrunk,
        }
    }

    pub fn index(&self) -> u64 {
        *common_field!(self, index)
    }

    pub fn prev_hash(&self) -> &Digest {
        common_field!(self, prev_hash)
    }

    pub fn block_hash(&self) -> &Digest {
        common_field!(self, block_hash)
    }

    /// `d_b` for full blocks, `d_{b,1}` for shrunk ones: what warranties sign.
    pub fn digest(&self) -> &Digest {
        common_field!(self, digest)
    }

    pub fn control(&self) -> &B::Gt {
        common_field!(self, control)
    }

    pub fn warranty(&self) -> &Warranty {
        common_field!(self, warranty)
    }

    pub fn owner(&self) -> Option<&str> {
        common_field!(self, owner).as_deref()
    }

    pub fn message_len(&self) -> u64 {
        *common_field!(self, message_len)
    }

    /// Recomputes `d_b` (or `d_{b,1}`) from the block's content.
    pub fn compute_digest(&self) -> Digest {
        match self {
            Block::Full(b) => full_digest::<B>(&b.entries, &b.control, &b.prev_hash),
            Block::Shrunk(b) => shrunk_digest::<B>(&b.payload_digest, &b.control, &b.prev_hash),
        }
    }

    /// Recomputes `h(B_b)` over the canonical record without its stored hash.
    pub fn compute_block_hash(&self) -> Digest {
        hash(&codec::encode_block_body(self))
    }
}

/// `d_{b,0} = h(c_1 || h(m_1) || ... || c_{I_b} || h(m_{I_b}))`.
pub fn entries_digest(entries: &[ShardEntry]) -> Digest {
    let mut h = FieldHasher::new();
    push_entries(&mut h, entries);
    h.finish()
}

/// `d_b = h(c_1 || h(m_1) || ... || c_b || h(B_{b-1}))`.
pub fn full_digest<B: BilinearGroup>(
    entries: &[ShardEntry],
    control: &B::Gt,
    prev_hash: &Digest,
) -> Digest {
    let mut h = FieldHasher::new();
    push_entries(&mut h, entries);
    h.field(&B::encode_gt(control))
        .field(prev_hash.as_bytes())
        .finish()
}

/// `d_{b,1} = h(d_{b,0} || c_b || h(B_{b-1}))`.
pub fn shrunk_digest<B: BilinearGroup>(
    payload_digest: &Digest,
    control: &B::Gt,
    prev_hash: &Digest,
) -> Digest {
    FieldHasher::new()
        .field(payload_digest.as_bytes())
        .field(&B::encode_gt(control))
        .field(prev_hash.as_bytes())
        .finish()
}

fn push_entries(h: &mut FieldHasher, entries: &[ShardEntry]) {
    for e in entries {
        h.field(&e.ciphertext).field(e.plaintext_digest.as_bytes());
    }
}
