//! The three protocol roles.
//!
//! * [`keeper`]: the File Keeper sets up the masking shards, issues
//!   encryption tokens and re-keys shards and encapsulated keys every epoch.
//! * [`user`]: data owners encrypt files, encapsulate the session key and
//!   hand out epoch-limited unlocked keys.
//! * [`provider`]: service providers open sealed grants and decrypt.
//!
//! Every time-indexed value carries its epoch explicitly so that mixing
//! values from different epochs is a detectable error rather than silent
//! garbage.

pub mod keeper;
pub mod provider;
pub mod user;

use serde::Serialize;
use thiserror::Error;

use crate::bilinear::{BilinearError, BilinearGroup, GroupDescription};
use crate::digest::{Digest, HashId};

pub use keeper::{keeper_setup, EpochStep, FileKeeper, Handover, HandoverChannel, KeeperSecret};
pub use provider::{provider_decrypt, ProviderKeypair, SealedGrant};
pub use user::{EncryptedPayload, UserKeypair};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("block length {block_bytes} is smaller than one shard ({shard_width} bytes)")]
    BlockTooSmall { block_bytes: usize, shard_width: usize },
    #[error("epoch mismatch: expected {expected}, found {found}")]
    EpochMismatch { expected: u64, found: u64 },
    #[error("encryption token is for epoch {token}, shards are at epoch {shards}")]
    StaleToken { token: u64, shards: u64 },
    #[error("message is empty")]
    EmptyMessage,
    #[error("message of {len} bytes exceeds block capacity of {capacity} bytes")]
    MessageTooLong { len: usize, capacity: usize },
    #[error("public key is the group identity")]
    IdentityPublicKey,
    #[error("file keeper has been retired")]
    KeeperRetired,
    #[error("malformed payload: {0}")]
    MalformedPayload(String),
    #[error("{} of {} shards failed digest verification", .0.failed().len(), .0.checks.len())]
    Integrity(Box<IntegrityFailure>),
    #[error(transparent)]
    Bilinear(#[from] BilinearError),
}

/// Public parameters fixed at setup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerParams {
    pub group: GroupDescription,
    /// Requested data block length `|B|` in bytes.
    pub block_bytes: usize,
    /// Maximum shards per block, `I = ceil(|B| / δ)`.
    pub shard_count: usize,
    /// Shard width `δ` in bytes (the GT encoding width).
    pub shard_width: usize,
    pub hash: HashId,
}

impl LedgerParams {
    pub fn capacity(&self) -> usize {
        self.shard_count * self.shard_width
    }

    /// The masking shard index `ī` checked against block `b`'s control shard.
    ///
    /// Shards are numbered `1..=I`, so the index is `((b - 1) mod I) + 1`.
    pub fn control_index(&self, block: u64) -> usize {
        debug_assert!(block >= 1);
        ((block - 1) % self.shard_count as u64) as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetupRequest {
    pub block_bytes: usize,
}

/// Public masking shards `ε_{i,t}` for one epoch, numbered from 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskingShards<B: BilinearGroup> {
    pub epoch: u64,
    pub shards: Vec<B::G1>,
}

impl<B: BilinearGroup> MaskingShards<B> {
    /// Shard `i` with `1 <= i <= I`.
    pub fn get(&self, i: usize) -> Option<&B::G1> {
        i.checked_sub(1).and_then(|k| self.shards.get(k))
    }

    pub fn len(&self) -> usize {
        self.shards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shards.is_empty()
    }
}

/// `k_{l,0,t} = q^{1/s_t}`, issued by the keeper for one epoch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptionToken<B: BilinearGroup> {
    pub epoch: u64,
    pub value: B::G2,
}

/// `k_{b,1,t} = g^{v k_b / s_t}`, kept on the updating ledger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncapsulatedKey<B: BilinearGroup> {
    pub block: u64,
    pub epoch: u64,
    pub value: B::G2,
}

/// `k_{b,2,t} = g^{μ k_b / s_t}`, valid until the next epoch update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnlockedKey<B: BilinearGroup> {
    pub block: u64,
    pub epoch: u64,
    pub value: B::G2,
}

/// One encrypted shard with the digest of its plaintext piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardEntry {
    /// 1-based shard index.
    pub index: u32,
    pub ciphertext: Vec<u8>,
    pub plaintext_digest: Digest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShardCheck {
    pub index: u32,
    pub ok: bool,
}

/// Per-shard digest results of a failed decryption.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegrityFailure {
    pub checks: Vec<ShardCheck>,
    pub key_epoch: u64,
    pub shards_epoch: u64,
}

impl IntegrityFailure {
    pub fn failed(&self) -> Vec<u32> {
        self.checks.iter().filter(|c| !c.ok).map(|c| c.index).collect()
    }

    pub fn stale(&self) -> bool {
        self.key_epoch != self.shards_epoch
    }
}

/// Number of `δ`-byte pieces needed for `len` bytes.
pub fn pieces_for(len: usize, shard_width: usize) -> usize {
    len.div_ceil(shard_width)
}

pub(crate) fn check_epoch(expected: u64, found: u64) -> Result<(), ProtocolError> {
    if expected == found {
        Ok(())
    } else {
        Err(ProtocolError::EpochMismatch { expected, found })
    }
}

pub(crate) fn xor_into(dst: &mut [u8], pad: &[u8]) {
    debug_assert_eq!(dst.len(), pad.len());
    for (d, p) in dst.iter_mut().zip(pad) {
        *d ^= p;
    }
}
