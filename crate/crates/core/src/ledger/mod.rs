//! The two-part ledger: an immutable chain of data blocks and the updating
//! state of masking shards and encapsulated keys.
//!
//! Blocks never change once appended. Re-keying touches only the
//! [`VariableState`]; the control shard stored in every block is what lets an
//! observer confirm that re-keying was done honestly.

mod audit;
mod block;
pub mod warranty;

use std::collections::BTreeMap;

use rand::RngCore;
use thiserror::Error;

use crate::bilinear::{pad_width, BilinearGroup};
use crate::digest::Digest;
use crate::protocol::{
    pieces_for, EncapsulatedKey, EncryptedPayload, FileKeeper, LedgerParams, MaskingShards,
    ProtocolError, ShardEntry,
};

pub use audit::{audit_chain, audit_variable_state, AuditFinding, AuditReport, AuditStage};
pub use block::{
    entries_digest, full_digest, shrunk_digest, Block, ChainVariant, DataBlock, ShrunkBlock,
};
pub use warranty::{
    mine_pow, sign_warranty, verify_pow, verify_warranty, Warranty, WarrantyError, WarrantyKey,
    WarrantyKind, WarrantyRequest, MAX_POW_DIFFICULTY,
};

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("payload is for epoch {payload}, ledger state is at epoch {state}")]
    EpochMismatch { payload: u64, state: u64 },
    #[error("payload has {found} shards, block capacity is {max}")]
    TooManyShards { found: usize, max: usize },
    #[error("malformed payload: {0}")]
    MalformedPayload(String),
    #[error("shrunk blocks need a payload locator")]
    MissingLocator,
    #[error("no block {0}")]
    NoSuchBlock(u64),
    #[error("no encapsulated key for block {0}")]
    MissingKey(u64),
    #[error("payload does not match the digest recorded in block {0}")]
    PayloadMismatch(u64),
    #[error(transparent)]
    Warranty(#[from] WarrantyError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// The updating section: current shards and one encapsulated key per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableState<B: BilinearGroup> {
    pub shards: MaskingShards<B>,
    pub keys: BTreeMap<u64, EncapsulatedKey<B>>,
}

impl<B: BilinearGroup> VariableState<B> {
    pub fn new(shards: MaskingShards<B>) -> Self {
        VariableState {
            shards,
            keys: BTreeMap::new(),
        }
    }

    pub fn epoch(&self) -> u64 {
        self.shards.epoch
    }

    pub fn key(&self, block: u64) -> Option<&EncapsulatedKey<B>> {
        self.keys.get(&block)
    }
}

/// Re-keys every shard and every encapsulated key with one fresh time-key.
///
/// Either everything advances to epoch `j+1` or nothing changes.
pub fn update_epoch<B: BilinearGroup, R: RngCore + ?Sized>(
    state: &mut VariableState<B>,
    keeper: &mut FileKeeper<B>,
    rng: &mut R,
) -> Result<(), LedgerError> {
    let next = keeper.advance(rng, |step| next_state(state, step))?;
    *state = next;
    Ok(())
}

pub(crate) fn next_state<B: BilinearGroup>(
    state: &VariableState<B>,
    step: &crate::protocol::EpochStep<B>,
) -> Result<VariableState<B>, LedgerError> {
    let shards = step.update_shards(&state.shards)?;
    let keys = state
        .keys
        .iter()
        .map(|(b, k)| step.update_encapsulated(k).map(|k| (*b, k)))
        .collect::<Result<_, _>>()?;
    Ok(VariableState { shards, keys })
}

/// Options for [`Chain::append`].
#[derive(Debug, Clone)]
pub struct AppendRequest<'a> {
    pub warranty: WarrantyRequest<'a>,
    pub owner: Option<String>,
    /// Where the payload of a shrunk block is stored. Required for shrunk chains.
    pub locator: Option<String>,
}

impl Default for AppendRequest<'_> {
    fn default() -> Self {
        AppendRequest {
            warranty: WarrantyRequest::None,
            owner: None,
            locator: None,
        }
    }
}

/// The static, append-only chain of blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain<B: BilinearGroup> {
    params: LedgerParams,
    variant: ChainVariant,
    pow_difficulty: u32,
    genesis: Digest,
    blocks: Vec<Block<B>>,
}

impl<B: BilinearGroup> Chain<B> {
    pub fn new(
        params: LedgerParams,
        variant: ChainVariant,
        pow_difficulty: u32,
    ) -> Result<Self, LedgerError> {
        if pow_difficulty > MAX_POW_DIFFICULTY {
            return Err(WarrantyError::DifficultyTooHigh(pow_difficulty).into());
        }
        Ok(Chain {
            params,
            variant,
            pow_difficulty,
            genesis: Digest::GENESIS,
            blocks: Vec::new(),
        })
    }

    /// Reassembles a chain without checking it; run [`audit_chain`] on the result.
    pub fn from_parts(
        params: LedgerParams,
        variant: ChainVariant,
        pow_difficulty: u32,
        genesis: Digest,
        blocks: Vec<Block<B>>,
    ) -> Self {
        Chain {
            params,
            variant,
            pow_difficulty,
            genesis,
            blocks,
        }
    }

    pub fn params(&self) -> &LedgerParams {
        &self.params
    }

    pub fn variant(&self) -> ChainVariant {
        self.variant
    }

    pub fn pow_difficulty(&self) -> u32 {
        self.pow_difficulty
    }

    pub fn genesis(&self) -> &Digest {
        &self.genesis
    }

    pub fn blocks(&self) -> &[Block<B>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block `b`, numbered from 1.
    pub fn block(&self, b: u64) -> Option<&Block<B>> {
        b.checked_sub(1).and_then(|k| self.blocks.get(k as usize))
    }

    pub fn tip_hash(&self) -> &Digest {
        self.blocks.last().map_or(&self.genesis, |b| b.block_hash())
    }

    /// Places an encrypted payload in the next block and records its
    /// encapsulated key in `state`.
    ///
    /// For shrunk chains only the payload digest is recorded; the caller keeps
    /// `payload.entries` at the requested locator.
    ///
    /// Nothing is modified unless the whole append succeeds.
    pub fn append(
        &mut self,
        state: &mut VariableState<B>,
        payload: &EncryptedPayload<B>,
        request: AppendRequest<'_>,
    ) -> Result<&Block<B>, LedgerError> {
        if payload.epoch != state.epoch() {
            return Err(LedgerError::EpochMismatch {
                payload: payload.epoch,
                state: state.epoch(),
            });
        }
        self.check_payload(&payload.entries, payload.message_len)?;
        let locator = match (self.variant, request.locator) {
            (ChainVariant::Shrunk, None) => return Err(LedgerError::MissingLocator),
            (_, loc) => loc,
        };

        let index = self.blocks.len() as u64 + 1;
        let control_shard = state
            .shards
            .get(self.params.control_index(index))
            .ok_or_else(|| {
                LedgerError::MalformedPayload("masking shard list is shorter than I".into())
            })?;
        let control = B::pair(control_shard, &payload.encapsulated);
        let prev_hash = *self.tip_hash();

        let mut block = match self.variant {
            ChainVariant::Full => {
                let digest = full_digest::<B>(&payload.entries, &control, &prev_hash);
                Block::Full(DataBlock {
                    index,
                    entries: payload.entries.clone(),
                    control,
                    prev_hash,
                    digest,
                    warranty: sign_warranty(request.warranty, &digest, self.pow_difficulty)?,
                    owner: request.owner,
                    message_len: payload.message_len,
                    block_hash: Digest::default(),
                })
            }
            ChainVariant::Shrunk => {
                let payload_digest = entries_digest(&payload.entries);
                let digest = shrunk_digest::<B>(&payload_digest, &control, &prev_hash);
                Block::Shrunk(ShrunkBlock {
                    index,
                    payload_digest,
                    control,
                    prev_hash,
                    digest,
                    warranty: sign_warranty(request.warranty, &digest, self.pow_difficulty)?,
                    owner: request.owner,
                    message_len: payload.message_len,
                    locator: locator.unwrap_or_default(),
                    block_hash: Digest::default(),
                })
            }
        };
        let block_hash = block.compute_block_hash();
        match &mut block {
            Block::Full(b) => b.block_hash = block_hash,
            Block::Shrunk(b) => b.block_hash = block_hash,
        }

        state.keys.insert(
            index,
            EncapsulatedKey {
                block: index,
                epoch: payload.epoch,
                value: payload.encapsulated.clone(),
            },
        );
        self.blocks.push(block);
        Ok(self.blocks.last().expect("just pushed"))
    }

    fn check_payload(&self, entries: &[ShardEntry], message_len: u64) -> Result<(), LedgerError> {
        let max = self.params.shard_count;
        if entries.is_empty() || entries.len() > max {
            return Err(LedgerError::TooManyShards {
                found: entries.len(),
                max,
            });
        }
        let width = pad_width::<B>();
        for (k, e) in entries.iter().enumerate() {
            if e.index as usize != k + 1 || e.ciphertext.len() != width {
                return Err(LedgerError::MalformedPayload(format!(
                    "entry at position {} has index {} and {} bytes",
                    k + 1,
                    e.index,
                    e.ciphertext.len()
                )));
            }
        }
        let len = usize::try_from(message_len).unwrap_or(usize::MAX);
        if len == 0 || pieces_for(len, width) != entries.len() {
            return Err(LedgerError::MalformedPayload(format!(
                "message length {message_len} does not match {} shards",
                entries.len()
            )));
        }
        Ok(())
    }

    /// Encrypted entries of block `b`, reading `external` for shrunk blocks
    /// and checking them against the recorded payload digest.
    pub fn entries_for<'a>(
        &'a self,
        b: u64,
        external: Option<&'a [ShardEntry]>,
    ) -> Result<&'a [ShardEntry], LedgerError> {
        match self.block(b).ok_or(LedgerError::NoSuchBlock(b))? {
            Block::Full(block) => Ok(&block.entries),
            Block::Shrunk(block) => {
                let entries = external.ok_or(LedgerError::PayloadMismatch(b))?;
                if entries_digest(entries) == block.payload_digest {
                    Ok(entries)
                } else {
                    Err(LedgerError::PayloadMismatch(b))
                }
            }
        }
    }
}
