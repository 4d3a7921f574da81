//! Canonical binary encodings of every ledger object.
//!
//! Each file starts with an 8-byte header:
//!
//! ```text
//! magic "SHLG" | major u8 | minor u8 | kind u8 | backend u8
//! ```
//!
//! followed by fields in a fixed order. Integers are big-endian, variable
//! fields are prefixed with a 4-byte length and group elements use the
//! backend's fixed-width canonical encoding. Decoding is strict: any encoding
//! it accepts re-encodes to the same bytes.

pub mod store;
pub mod text;
mod wire;

use thiserror::Error;

use crate::bilinear::{BackendId, BilinearError, BilinearGroup};
use crate::digest::{hash, Digest, HashId};
use crate::ledger::{
    audit_chain, AuditFinding, AuditReport, AuditStage, Block, Chain, ChainVariant, DataBlock, ShrunkBlock, VariableState, Warranty, WarrantyKey,
    WarrantyKind, MAX_POW_DIFFICULTY,
};
use crate::protocol::{
    EncapsulatedKey, Handover, KeeperSecret, LedgerParams, MaskingShards, ProviderKeypair,
    SealedGrant, ShardEntry, UserKeypair,
};

use wire::{Reader, Writer};

pub const MAGIC: [u8; 4] = *b"SHLG";
pub const VERSION_MAJOR: u8 = 1;
pub const VERSION_MINOR: u8 = 0;
pub const HEADER_LEN: usize = 8;

const BLOCK_FULL: u8 = 1;
const BLOCK_SHRUNK: u8 = 2;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("truncated at offset {offset}: need {needed} bytes, {available} available")]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },
    #[error("bad magic at offset 0")]
    BadMagic,
    #[error("unsupported format version {major}.{minor}")]
    UnsupportedVersion { major: u8, minor: u8 },
    #[error("expected a {expected:?} file, found {found:?}")]
    WrongKind { expected: FileKind, found: FileKind },
    #[error("unknown file kind tag {0}")]
    UnknownKind(u8),
    #[error("file is for backend {found}, expected {expected}")]
    BackendMismatch { expected: String, found: String },
    #[error("unknown {what} tag {tag} at offset {offset}")]
    BadTag {
        offset: usize,
        what: &'static str,
        tag: u8,
    },
    #[error("bad group element at offset {offset}: {source}")]
    Element {
        offset: usize,
        #[source]
        source: BilinearError,
    },
    #[error("{count} trailing bytes at offset {offset}")]
    TrailingBytes { offset: usize, count: usize },
    #[error("file belongs to different ledger parameters")]
    ParamsMismatch,
    #[error("invalid value at offset {offset}: {reason}")]
    Invalid { offset: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Params,
    Chain,
    State,
    UserPublic,
    ProviderPublic,
    UserSecret,
    ProviderSecret,
    KeeperSecret,
    Handover,
    Grant,
    Payload,
    SignerSecret,
}

impl FileKind {
    const ALL: [FileKind; 12] = [
        FileKind::Params,
        FileKind::Chain,
        FileKind::State,
        FileKind::UserPublic,
        FileKind::ProviderPublic,
        FileKind::UserSecret,
        FileKind::ProviderSecret,
        FileKind::KeeperSecret,
        FileKind::Handover,
        FileKind::Grant,
        FileKind::Payload,
        FileKind::SignerSecret,
    ];

    pub fn tag(self) -> u8 {
        FileKind::ALL.iter().position(|k| *k == self).expect("listed") as u8 + 1
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        (tag as usize).checked_sub(1).and_then(|i| FileKind::ALL.get(i)).copied()
    }
}

/// Decoded file header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub kind: FileKind,
    pub backend: BackendId,
    pub minor: u8,
}

fn write_header<B: BilinearGroup>(w: &mut Writer, kind: FileKind) {
    w.raw(&MAGIC)
        .u8(VERSION_MAJOR)
        .u8(VERSION_MINOR)
        .u8(kind.tag())
        .u8(B::description().backend.tag());
}

/// Reads and validates only the header, e.g. to pick a backend.
pub fn peek_header(bytes: &[u8]) -> Result<Header, CodecError> {
    let mut r = Reader::new(bytes);
    read_header(&mut r)
}

fn read_header(r: &mut Reader<'_>) -> Result<Header, CodecError> {
    if r.take(4)? != MAGIC {
        return Err(CodecError::BadMagic);
    }
    let major = r.u8()?;
    let minor = r.u8()?;
    if major != VERSION_MAJOR {
        return Err(CodecError::UnsupportedVersion { major, minor });
    }
    let kind_tag = r.u8()?;
    let kind = FileKind::from_tag(kind_tag).ok_or(CodecError::UnknownKind(kind_tag))?;
    let at = r.offset();
    let backend_tag = r.u8()?;
    let backend = BackendId::from_tag(backend_tag).ok_or(CodecError::BadTag {
        offset: at,
        what: "backend",
        tag: backend_tag,
    })?;
    Ok(Header {
        kind,
        backend,
        minor,
    })
}

fn expect_header<B: BilinearGroup>(r: &mut Reader<'_>, kind: FileKind) -> Result<(), CodecError> {
    let h = read_header(r)?;
    if h.kind != kind {
        return Err(CodecError::WrongKind {
            expected: kind,
            found: h.kind,
        });
    }
    let ours = B::description().backend;
    if h.backend != ours {
        return Err(CodecError::BackendMismatch {
            expected: ours.name().into(),
            found: h.backend.name().into(),
        });
    }
    Ok(())
}

fn invalid(offset: usize, reason: impl Into<String>) -> CodecError {
    CodecError::Invalid {
        offset,
        reason: reason.into(),
    }
}

fn read_usize(r: &mut Reader<'_>) -> Result<usize, CodecError> {
    let at = r.offset();
    usize::try_from(r.u64()?).map_err(|_| invalid(at, "length does not fit in memory"))
}

// ---- parameters -------------------------------------------------------------

pub fn encode_params<B: BilinearGroup>(params: &LedgerParams) -> Vec<u8> {
    let mut w = Writer::new();
    write_header::<B>(&mut w, FileKind::Params);
    let g = &params.group;
    w.bytes(&g.order)
        .u32(g.scalar_width as u32)
        .u32(g.g1_width as u32)
        .u32(g.g2_width as u32)
        .u32(g.gt_width as u32)
        .u64(params.block_bytes as u64)
        .u64(params.shard_count as u64)
        .u64(params.shard_width as u64)
        .u8(params.hash.tag())
        .raw(&B::encode_g1(&B::g1_base()))
        .raw(&B::encode_g2(&B::g2_base()));
    w.finish()
}

/// Parameters must describe backend `B` exactly, including its generators.
pub fn decode_params<B: BilinearGroup>(bytes: &[u8]) -> Result<LedgerParams, CodecError> {
    let mut r = Reader::new(bytes);
    expect_header::<B>(&mut r, FileKind::Params)?;
    let group = B::description();
    let at = r.offset();
    let order = r.bytes()?;
    let widths = [r.u32()?, r.u32()?, r.u32()?, r.u32()?];
    if order != group.order.as_slice()
        || widths
            != [
                group.scalar_width as u32,
                group.g1_width as u32,
                group.g2_width as u32,
                group.gt_width as u32,
            ]
    {
        return Err(invalid(at, "group description does not match the backend"));
    }
    let at = r.offset();
    let block_bytes = read_usize(&mut r)?;
    let shard_count = read_usize(&mut r)?;
    let shard_width = read_usize(&mut r)?;
    if shard_width != group.gt_width
        || block_bytes < shard_width
        || shard_count != block_bytes.div_ceil(shard_width)
    {
        return Err(invalid(at, "inconsistent block length, shard count and shard width"));
    }
    let at = r.offset();
    let tag = r.u8()?;
    let hash_id = HashId::from_tag(tag).ok_or(CodecError::BadTag {
        offset: at,
        what: "hash",
        tag,
    })?;
    let at = r.offset();
    if r.g1::<B>()? != B::g1_base() || r.g2::<B>()? != B::g2_base() {
        return Err(invalid(at, "generators differ from the backend's"));
    }
    r.finish()?;
    Ok(LedgerParams {
        group,
        block_bytes,
        shard_count,
        shard_width,
        hash: hash_id,
    })
}

/// Digest binding chain and state files to one parameter set.
pub fn params_digest<B: BilinearGroup>(params: &LedgerParams) -> Digest {
    hash(&encode_params::<B>(params))
}

// ---- blocks and chain -------------------------------------------------------

fn write_warranty(w: &mut Writer, warranty: &Warranty) {
    w.u8(warranty.kind.tag()).bytes(&warranty.payload);
}

fn read_warranty(r: &mut Reader<'_>) -> Result<Warranty, CodecError> {
    let at = r.offset();
    let tag = r.u8()?;
    let kind = WarrantyKind::from_tag(tag).ok_or(CodecError::BadTag {
        offset: at,
        what: "warranty",
        tag,
    })?;
    Ok(Warranty {
        kind,
        payload: r.bytes()?.to_vec(),
    })
}

fn write_entries(w: &mut Writer, entries: &[ShardEntry]) {
    w.len(entries.len());
    for e in entries {
        w.u32(e.index).bytes(&e.ciphertext).digest(&e.plaintext_digest);
    }
}

fn read_entries(r: &mut Reader<'_>) -> Result<Vec<ShardEntry>, CodecError> {
    let at = r.offset();
    let count = r.u32()? as usize;
    // Each entry takes at least 40 bytes; reject counts the input cannot hold.
    if count.saturating_mul(40) > r.remaining() {
        return Err(invalid(at, format!("entry count {count} exceeds record size")));
    }
    (0..count)
        .map(|_| {
            Ok(ShardEntry {
                index: r.u32()?,
                ciphertext: r.bytes()?.to_vec(),
                plaintext_digest: r.digest()?,
            })
        })
        .collect()
}

/// Canonical bytes of a block without its stored record hash; `h(B_b)` is
/// the SHA-256 of exactly these bytes.
pub fn encode_block_body<B: BilinearGroup>(block: &Block<B>) -> Vec<u8> {
    let mut w = Writer::new();
    match block {
        Block::Full(b) => {
            w.u8(BLOCK_FULL).u64(b.index).digest(&b.prev_hash);
            write_entries(&mut w, &b.entries);
            w.raw(&B::encode_gt(&b.control))
                .digest(&b.digest)
                .u64(b.message_len)
                .opt_str(b.owner.as_deref());
            write_warranty(&mut w, &b.warranty);
        }
        Block::Shrunk(b) => {
            w.u8(BLOCK_SHRUNK)
                .u64(b.index)
                .digest(&b.prev_hash)
                .digest(&b.payload_digest)
                .raw(&B::encode_gt(&b.control))
                .digest(&b.digest)
                .u64(b.message_len)
                .opt_str(b.owner.as_deref())
                .bytes(b.locator.as_bytes());
            write_warranty(&mut w, &b.warranty);
        }
    }
    w.finish()
}

/// One chain record: `len u32 | body | h(B_b)`.
pub fn encode_block<B: BilinearGroup>(block: &Block<B>) -> Vec<u8> {
    let body = encode_block_body(block);
    let mut w = Writer::new();
    w.bytes(&body).digest(block.block_hash());
    w.finish()
}

fn read_block<B: BilinearGroup>(r: &mut Reader<'_>) -> Result<Block<B>, CodecError> {
    let body_len = r.u32()? as usize;
    let mut body = r.sub(body_len)?;
    let at = body.offset();
    let block = match body.u8()? {
        BLOCK_FULL => {
            let index = body.u64()?;
            let prev_hash = body.digest()?;
            let entries = read_entries(&mut body)?;
            Block::Full(DataBlock {
                index,
                prev_hash,
                entries,
                control: body.gt::<B>()?,
                digest: body.digest()?,
                message_len: body.u64()?,
                owner: body.opt_str()?,
                warranty: read_warranty(&mut body)?,
                block_hash: Digest::default(),
            })
        }
        BLOCK_SHRUNK => Block::Shrunk(ShrunkBlock {
            index: body.u64()?,
            prev_hash: body.digest()?,
            payload_digest: body.digest()?,
            control: body.gt::<B>()?,
            digest: body.digest()?,
            message_len: body.u64()?,
            owner: body.opt_str()?,
            locator: body.string()?,
            warranty: read_warranty(&mut body)?,
            block_hash: Digest::default(),
        }),
        tag => {
            return Err(CodecError::BadTag {
                offset: at,
                what: "block variant",
                tag,
            })
        }
    };
    body.finish()?;
    let stored = r.digest()?;
    Ok(match block {
        Block::Full(b) => Block::Full(DataBlock {
            block_hash: stored,
            ..b
        }),
        Block::Shrunk(b) => Block::Shrunk(ShrunkBlock {
            block_hash: stored,
            ..b
        }),
    })
}

pub fn decode_block<B: BilinearGroup>(bytes: &[u8]) -> Result<Block<B>, CodecError> {
    let mut r = Reader::new(bytes);
    let block = read_block(&mut r)?;
    r.finish()?;
    Ok(block)
}

/// Chain file prefix: header, parameter binding, chain configuration and a
/// digest over all of those. Block records follow and are only ever appended.
pub fn encode_chain_header<B: BilinearGroup>(chain: &Chain<B>) -> Vec<u8> {
    let mut w = Writer::new();
    write_header::<B>(&mut w, FileKind::Chain);
    w.digest(&params_digest::<B>(chain.params()))
        .u8(chain.variant().tag())
        .u8(chain.pow_difficulty() as u8)
        .digest(chain.genesis());
    let mut out = w.finish();
    let seal = hash(&out);
    out.extend_from_slice(seal.as_bytes());
    out
}

pub fn encode_chain<B: BilinearGroup>(chain: &Chain<B>) -> Vec<u8> {
    let mut out = encode_chain_header(chain);
    for block in chain.blocks() {
        out.extend_from_slice(&encode_block(block));
    }
    out
}

/// Decodes a chain file. Structural only: run an audit to check the content.
pub fn decode_chain<B: BilinearGroup>(
    bytes: &[u8],
    params: &LedgerParams,
) -> Result<Chain<B>, CodecError> {
    match decode_chain_prefix(bytes, params)? {
        (chain, None) => Ok(chain),
        (_, Some((_, err))) => Err(err),
    }
}

/// A decoded chain prefix and the first record that failed, if any.
pub type ChainPrefix<B> = (Chain<B>, Option<(u64, CodecError)>);

/// Decodes as many block records as possible. A record that fails to decode
/// is returned with its 1-based block number; header errors are returned
/// directly.
pub fn decode_chain_prefix<B: BilinearGroup>(
    bytes: &[u8],
    params: &LedgerParams,
) -> Result<ChainPrefix<B>, CodecError> {
    let mut r = Reader::new(bytes);
    expect_header::<B>(&mut r, FileKind::Chain)?;
    if r.digest()? != params_digest::<B>(params) {
        return Err(CodecError::ParamsMismatch);
    }
    let at = r.offset();
    let tag = r.u8()?;
    let variant = ChainVariant::from_tag(tag).ok_or(CodecError::BadTag {
        offset: at,
        what: "chain variant",
        tag,
    })?;
    let at = r.offset();
    let pow_difficulty = r.u8()? as u32;
    if pow_difficulty > MAX_POW_DIFFICULTY {
        return Err(invalid(at, format!("difficulty {pow_difficulty} above cap")));
    }
    let genesis = r.digest()?;
    let at = r.offset();
    if r.digest()? != hash(&bytes[..at]) {
        return Err(invalid(at, "chain header digest mismatch"));
    }
    let mut blocks = Vec::new();
    let mut failure = None;
    while !r.is_empty() {
        match read_block::<B>(&mut r) {
            Ok(block) => blocks.push(block),
            Err(e) => {
                failure = Some((blocks.len() as u64 + 1, e));
                break;
            }
        }
    }
    let chain = Chain::from_parts(params.clone(), variant, pow_difficulty, genesis, blocks);
    Ok((chain, failure))
}

/// Audits a serialized chain. Decoding failures become findings: against
/// the block whose record is unreadable, or chain-wide for the header.
pub fn audit_encoded_chain<B: BilinearGroup>(bytes: &[u8], params: &LedgerParams) -> AuditReport {
    let finding = |block, err: CodecError| AuditFinding {
        block,
        stage: AuditStage::Structure,
        detail: format!("unreadable record: {err}"),
        expected: None,
        actual: None,
    };
    match decode_chain_prefix::<B>(bytes, params) {
        Err(e) => AuditReport {
            checked: 0,
            findings: vec![finding(None, e)],
        },
        Ok((chain, failure)) => {
            let mut report = audit_chain(&chain);
            if let Some((b, e)) = failure {
                report.checked += 1;
                report.findings.push(finding(Some(b), e));
            }
            report
        }
    }
}

// ---- variable state ---------------------------------------------------------

pub fn encode_state<B: BilinearGroup>(state: &VariableState<B>, params: &LedgerParams) -> Vec<u8> {
    let mut w = Writer::new();
    write_header::<B>(&mut w, FileKind::State);
    w.digest(&params_digest::<B>(params))
        .u64(state.epoch())
        .len(state.shards.len());
    for s in &state.shards.shards {
        w.raw(&B::encode_g1(s));
    }
    w.len(state.keys.len());
    for (b, k) in &state.keys {
        w.u64(*b).raw(&B::encode_g2(&k.value));
    }
    w.finish()
}

pub fn decode_state<B: BilinearGroup>(
    bytes: &[u8],
    params: &LedgerParams,
) -> Result<VariableState<B>, CodecError> {
    let mut r = Reader::new(bytes);
    expect_header::<B>(&mut r, FileKind::State)?;
    if r.digest()? != params_digest::<B>(params) {
        return Err(CodecError::ParamsMismatch);
    }
    let epoch = r.u64()?;
    let at = r.offset();
    let count = r.u32()? as usize;
    if count != params.shard_count {
        return Err(invalid(at, format!("{count} shards, parameters say {}", params.shard_count)));
    }
    let shards = (0..count).map(|_| r.g1::<B>()).collect::<Result<_, _>>()?;
    let nkeys = r.u32()?;
    let mut state = VariableState::new(MaskingShards { epoch, shards });
    let mut last = 0u64;
    for _ in 0..nkeys {
        let at = r.offset();
        let block = r.u64()?;
        if block <= last {
            return Err(invalid(at, "encapsulated keys not in ascending block order"));
        }
        last = block;
        let value = r.g2::<B>()?;
        state.keys.insert(block, EncapsulatedKey { block, epoch, value });
    }
    r.finish()?;
    Ok(state)
}

// ---- keys, secrets, grants, payloads ----------------------------------------

/// A user's published identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserPublic<B: BilinearGroup> {
    pub key: B::G2,
    /// Ed25519 key checking the user's block signatures.
    pub warranty_key: [u8; 32],
}

pub fn encode_user_public<B: BilinearGroup>(public: &UserPublic<B>) -> Vec<u8> {
    let mut w = Writer::new();
    write_header::<B>(&mut w, FileKind::UserPublic);
    w.raw(&B::encode_g2(&public.key)).raw(&public.warranty_key);
    w.finish()
}

pub fn decode_user_public<B: BilinearGroup>(bytes: &[u8]) -> Result<UserPublic<B>, CodecError> {
    let mut r = Reader::new(bytes);
    expect_header::<B>(&mut r, FileKind::UserPublic)?;
    let out = UserPublic {
        key: r.g2::<B>()?,
        warranty_key: r.array32()?,
    };
    r.finish()?;
    Ok(out)
}

pub fn encode_user_secret<B: BilinearGroup>(user: &UserKeypair<B>, signer: &WarrantyKey) -> Vec<u8> {
    let mut w = Writer::new();
    write_header::<B>(&mut w, FileKind::UserSecret);
    w.raw(&B::encode_scalar(&user.mu))
        .raw(&B::encode_scalar(&user.v))
        .raw(&signer.seed());
    w.finish()
}

pub fn decode_user_secret<B: BilinearGroup>(
    bytes: &[u8],
) -> Result<(UserKeypair<B>, WarrantyKey), CodecError> {
    let mut r = Reader::new(bytes);
    expect_header::<B>(&mut r, FileKind::UserSecret)?;
    let at = r.offset();
    let mu = r.scalar::<B>()?;
    let v = r.scalar::<B>()?;
    if B::scalar_is_zero(&mu) || B::scalar_is_zero(&v) {
        return Err(invalid(at, "zero user exponent"));
    }
    let seed = r.array32()?;
    r.finish()?;
    Ok((UserKeypair::from_secrets(mu, v), WarrantyKey::from_seed(seed)))
}

pub fn encode_provider_public<B: BilinearGroup>(key: &B::G2) -> Vec<u8> {
    let mut w = Writer::new();
    write_header::<B>(&mut w, FileKind::ProviderPublic);
    w.raw(&B::encode_g2(key));
    w.finish()
}

pub fn decode_provider_public<B: BilinearGroup>(bytes: &[u8]) -> Result<B::G2, CodecError> {
    let mut r = Reader::new(bytes);
    expect_header::<B>(&mut r, FileKind::ProviderPublic)?;
    let key = r.g2::<B>()?;
    r.finish()?;
    Ok(key)
}

pub fn encode_provider_secret<B: BilinearGroup>(provider: &ProviderKeypair<B>) -> Vec<u8> {
    let mut w = Writer::new();
    write_header::<B>(&mut w, FileKind::ProviderSecret);
    w.raw(&B::encode_scalar(&provider.secret));
    w.finish()
}

pub fn decode_provider_secret<B: BilinearGroup>(
    bytes: &[u8],
) -> Result<ProviderKeypair<B>, CodecError> {
    let mut r = Reader::new(bytes);
    expect_header::<B>(&mut r, FileKind::ProviderSecret)?;
    let d = r.scalar::<B>()?;
    r.finish()?;
    Ok(ProviderKeypair::from_secret(d))
}

fn encode_time_key<B: BilinearGroup>(kind: FileKind, secret: &KeeperSecret<B>) -> Vec<u8> {
    let mut w = Writer::new();
    write_header::<B>(&mut w, kind);
    w.u64(secret.epoch).raw(&B::encode_scalar(&secret.time_key));
    w.finish()
}

fn decode_time_key<B: BilinearGroup>(
    kind: FileKind,
    bytes: &[u8],
) -> Result<KeeperSecret<B>, CodecError> {
    let mut r = Reader::new(bytes);
    expect_header::<B>(&mut r, kind)?;
    let epoch = r.u64()?;
    let at = r.offset();
    let s = r.scalar::<B>()?;
    if B::scalar_is_zero(&s) {
        return Err(invalid(at, "zero time-key"));
    }
    r.finish()?;
    Ok(KeeperSecret::new(epoch, s))
}

pub fn encode_keeper_secret<B: BilinearGroup>(secret: &KeeperSecret<B>) -> Vec<u8> {
    encode_time_key(FileKind::KeeperSecret, secret)
}

pub fn decode_keeper_secret<B: BilinearGroup>(bytes: &[u8]) -> Result<KeeperSecret<B>, CodecError> {
    decode_time_key(FileKind::KeeperSecret, bytes)
}

/// Serializes a hand-over record for transport to the successor keeper.
pub fn encode_handover<B: BilinearGroup>(handover: &Handover<B>) -> Vec<u8> {
    encode_time_key(FileKind::Handover, &handover.secret)
}

pub fn decode_handover<B: BilinearGroup>(bytes: &[u8]) -> Result<Handover<B>, CodecError> {
    decode_time_key(FileKind::Handover, bytes).map(|secret| Handover { secret })
}

pub fn encode_signer_secret<B: BilinearGroup>(key: &WarrantyKey) -> Vec<u8> {
    let mut w = Writer::new();
    write_header::<B>(&mut w, FileKind::SignerSecret);
    w.raw(&key.seed());
    w.finish()
}

pub fn decode_signer_secret<B: BilinearGroup>(bytes: &[u8]) -> Result<WarrantyKey, CodecError> {
    let mut r = Reader::new(bytes);
    expect_header::<B>(&mut r, FileKind::SignerSecret)?;
    let seed = r.array32()?;
    r.finish()?;
    Ok(WarrantyKey::from_seed(seed))
}

pub fn encode_grant<B: BilinearGroup>(grant: &SealedGrant<B>) -> Vec<u8> {
    let mut w = Writer::new();
    write_header::<B>(&mut w, FileKind::Grant);
    w.u64(grant.block)
        .u64(grant.epoch)
        .raw(&B::encode_g2(&grant.ephemeral))
        .raw(&B::encode_g2(&grant.masked));
    w.finish()
}

pub fn decode_grant<B: BilinearGroup>(bytes: &[u8]) -> Result<SealedGrant<B>, CodecError> {
    let mut r = Reader::new(bytes);
    expect_header::<B>(&mut r, FileKind::Grant)?;
    let grant = SealedGrant {
        block: r.u64()?,
        epoch: r.u64()?,
        ephemeral: r.g2::<B>()?,
        masked: r.g2::<B>()?,
    };
    r.finish()?;
    Ok(grant)
}

/// Off-ledger payload of a shrunk block.
pub fn encode_payload<B: BilinearGroup>(entries: &[ShardEntry]) -> Vec<u8> {
    let mut w = Writer::new();
    write_header::<B>(&mut w, FileKind::Payload);
    write_entries(&mut w, entries);
    w.finish()
}

pub fn decode_payload<B: BilinearGroup>(bytes: &[u8]) -> Result<Vec<ShardEntry>, CodecError> {
    let mut r = Reader::new(bytes);
    expect_header::<B>(&mut r, FileKind::Payload)?;
    let entries = read_entries(&mut r)?;
    r.finish()?;
    Ok(entries)
}

#[cfg(test)]
mod tests;
