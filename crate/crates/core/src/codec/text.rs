//! Line-oriented text mirror of the binary files, for people reading a ledger.
//!
//! Each line is `key value`; binary values are lowercase hex. Nested blocks
//! are introduced by a `block N` line and indented by two spaces.

use std::fmt::Write;

use crate::bilinear::BilinearGroup;
use crate::ledger::{Block, Chain, VariableState};
use crate::protocol::LedgerParams;

fn line(out: &mut String, indent: usize, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{:indent$}{key} {value}", "", indent = indent);
}

pub fn params_text(params: &LedgerParams) -> String {
    let mut out = String::new();
    let g = &params.group;
    line(&mut out, 0, "backend", g.backend.name());
    line(&mut out, 0, "order", hex::encode(&g.order));
    line(&mut out, 0, "order-bits", g.order_bits());
    line(&mut out, 0, "block-bytes", params.block_bytes);
    line(&mut out, 0, "shards", params.shard_count);
    line(&mut out, 0, "shard-width", params.shard_width);
    line(&mut out, 0, "hash", "sha256");
    out
}

pub fn chain_text<B: BilinearGroup>(chain: &Chain<B>) -> String {
    let mut out = String::new();
    line(&mut out, 0, "variant", format!("{:?}", chain.variant()).to_lowercase());
    line(&mut out, 0, "pow-difficulty", chain.pow_difficulty());
    line(&mut out, 0, "genesis", chain.genesis().to_hex());
    line(&mut out, 0, "blocks", chain.len());
    for block in chain.blocks() {
        block_text(&mut out, block);
    }
    out
}

fn block_text<B: BilinearGroup>(out: &mut String, block: &Block<B>) {
    line(out, 0, "block", block.index());
    line(out, 2, "prev", block.prev_hash().to_hex());
    match block {
        Block::Full(b) => {
            for e in &b.entries {
                line(out, 2, &format!("shard.{}", e.index), hex::encode(&e.ciphertext));
                line(out, 2, &format!("shard.{}.digest", e.index), e.plaintext_digest.to_hex());
            }
        }
        Block::Shrunk(b) => {
            line(out, 2, "payload-digest", b.payload_digest.to_hex());
            line(out, 2, "locator", &b.locator);
        }
    }
    line(out, 2, "control", hex::encode(B::encode_gt(block.control())));
    line(out, 2, "digest", block.digest().to_hex());
    line(out, 2, "message-len", block.message_len());
    if let Some(owner) = block.owner() {
        line(out, 2, "owner", owner);
    }
    let w = block.warranty();
    line(out, 2, "warranty", format!("{:?}", w.kind).to_lowercase());
    if !w.payload.is_empty() {
        line(out, 2, "warranty-data", hex::encode(&w.payload));
    }
    line(out, 2, "hash", block.block_hash().to_hex());
}

pub fn state_text<B: BilinearGroup>(state: &VariableState<B>) -> String {
    let mut out = String::new();
    line(&mut out, 0, "epoch", state.epoch());
    for (i, s) in state.shards.shards.iter().enumerate() {
        line(&mut out, 0, &format!("shard.{}", i + 1), hex::encode(B::encode_g1(s)));
    }
    for (b, k) in &state.keys {
        line(&mut out, 0, &format!("key.{b}"), hex::encode(B::encode_g2(&k.value)));
    }
    out
}
