//! Public audits of both ledger sections. Audits never mutate and never fail;
//! every problem becomes a finding in the report.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::bilinear::{pad_width, BilinearGroup};
use crate::digest::Digest;
use crate::protocol::pieces_for;

use super::{Block, Chain, VariableState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditStage {
    /// Block numbering and back-links.
    Link,
    /// Shape of the block: shard count and widths, lengths, variant.
    Structure,
    /// `d_b` / `d_{b,1}` recomputation.
    Digest,
    /// `h(B_b)` over the full block record.
    BlockHash,
    Warranty,
    /// Control shard against the current shards and encapsulated key.
    Control,
    MissingKey,
    /// Epoch consistency inside the updating state.
    Epoch,
}

impl fmt::Display for AuditStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AuditStage::Link => "link",
            AuditStage::Structure => "structure",
            AuditStage::Digest => "digest",
            AuditStage::BlockHash => "block-hash",
            AuditStage::Warranty => "warranty",
            AuditStage::Control => "control",
            AuditStage::MissingKey => "missing-key",
            AuditStage::Epoch => "epoch",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditFinding {
    /// Block position (1-based); `None` for chain- or state-wide findings.
    pub block: Option<u64>,
    pub stage: AuditStage,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<String>,
}

impl AuditFinding {
    fn new(block: Option<u64>, stage: AuditStage, detail: impl Into<String>) -> Self {
        AuditFinding {
            block,
            stage,
            detail: detail.into(),
            expected: None,
            actual: None,
        }
    }

    fn digests(mut self, expected: &Digest, actual: &Digest) -> Self {
        self.expected = Some(expected.to_hex());
        self.actual = Some(actual.to_hex());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    /// Blocks examined.
    pub checked: usize,
    pub findings: Vec<AuditFinding>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn first_failure(&self) -> Option<&AuditFinding> {
        self.findings.first()
    }

    pub fn failed_blocks(&self) -> BTreeSet<u64> {
        self.findings.iter().filter_map(|f| f.block).collect()
    }

    pub fn merge(mut self, other: AuditReport) -> AuditReport {
        self.checked = self.checked.max(other.checked);
        self.findings.extend(other.findings);
        self
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return writeln!(f, "PASS: {} blocks checked", self.checked);
        }
        writeln!(
            f,
            "FAIL: {} findings over {} blocks",
            self.findings.len(),
            self.checked
        )?;
        for finding in &self.findings {
            match finding.block {
                Some(b) => write!(f, "  block {b} [{}] {}", finding.stage, finding.detail)?,
                None => write!(f, "  [{}] {}", finding.stage, finding.detail)?,
            }
            if let (Some(e), Some(a)) = (&finding.expected, &finding.actual) {
                write!(f, " (expected {e}, found {a})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Recomputes every digest, back-link and warranty of the static chain.
pub fn audit_chain<B: BilinearGroup>(chain: &Chain<B>) -> AuditReport {
    let mut findings = Vec::new();
    let params = chain.params();
    let width = pad_width::<B>();

    if *chain.genesis() != Digest::GENESIS {
        findings.push(
            AuditFinding::new(None, AuditStage::Link, "genesis hash is not the all-zero digest")
                .digests(&Digest::GENESIS, chain.genesis()),
        );
    }

    let mut expected_prev = *chain.genesis();
    for (pos, block) in chain.blocks().iter().enumerate() {
        let at = Some(pos as u64 + 1);

        if block.index() != pos as u64 + 1 {
            findings.push(AuditFinding::new(
                at,
                AuditStage::Link,
                format!("block numbered {} at position {}", block.index(), pos + 1),
            ));
        }
        if *block.prev_hash() != expected_prev {
            findings.push(
                AuditFinding::new(at, AuditStage::Link, "previous-block hash does not link")
                    .digests(&expected_prev, block.prev_hash()),
            );
        }

        if block.variant() != chain.variant() {
            findings.push(AuditFinding::new(
                at,
                AuditStage::Structure,
                format!("{:?} block in a {:?} chain", block.variant(), chain.variant()),
            ));
        }
        if let Block::Full(full) = block {
            if full.entries.is_empty() || full.entries.len() > params.shard_count {
                findings.push(AuditFinding::new(
                    at,
                    AuditStage::Structure,
                    format!("{} shards, allowed 1..={}", full.entries.len(), params.shard_count),
                ));
            }
            for (k, e) in full.entries.iter().enumerate() {
                if e.index as usize != k + 1 || e.ciphertext.len() != width {
                    findings.push(AuditFinding::new(
                        at,
                        AuditStage::Structure,
                        format!("shard {} malformed (index {}, {} bytes)", k + 1, e.index, e.ciphertext.len()),
                    ));
                }
            }
            let len = usize::try_from(full.message_len).unwrap_or(usize::MAX);
            if len == 0 || pieces_for(len, width) != full.entries.len() {
                findings.push(AuditFinding::new(
                    at,
                    AuditStage::Structure,
                    format!("message length {} inconsistent with {} shards", full.message_len, full.entries.len()),
                ));
            }
        } else if block.message_len() == 0
            || block.message_len() > params.capacity() as u64
        {
            findings.push(AuditFinding::new(
                at,
                AuditStage::Structure,
                format!("message length {} outside block capacity", block.message_len()),
            ));
        }

        let digest = block.compute_digest();
        if digest != *block.digest() {
            findings.push(
                AuditFinding::new(at, AuditStage::Digest, "block digest mismatch")
                    .digests(&digest, block.digest()),
            );
        }
        let block_hash = block.compute_block_hash();
        if block_hash != *block.block_hash() {
            findings.push(
                AuditFinding::new(at, AuditStage::BlockHash, "block record hash mismatch")
                    .digests(&block_hash, block.block_hash()),
            );
        }
        if let Err(e) = block
            .warranty()
            .verify(block.digest(), chain.pow_difficulty())
        {
            findings.push(AuditFinding::new(at, AuditStage::Warranty, e.to_string()));
        }

        expected_prev = *block.block_hash();
    }

    AuditReport {
        checked: chain.len(),
        findings,
    }
}

/// Checks `c_b = e(ε_ī, k_{b,1})` for every block against the current state.
pub fn audit_variable_state<B: BilinearGroup>(
    chain: &Chain<B>,
    state: &VariableState<B>,
) -> AuditReport {
    let mut findings = Vec::new();
    let params = chain.params();
    let epoch = state.epoch();

    if state.shards.len() != params.shard_count {
        findings.push(AuditFinding::new(
            None,
            AuditStage::Structure,
            format!("{} masking shards, expected {}", state.shards.len(), params.shard_count),
        ));
    }
    for (b, key) in &state.keys {
        if key.epoch != epoch || key.block != *b {
            findings.push(AuditFinding::new(
                Some(*b),
                AuditStage::Epoch,
                format!(
                    "key filed under block {b} is for block {} at epoch {}, state is at epoch {epoch}",
                    key.block, key.epoch
                ),
            ));
        }
        if *b == 0 || *b > chain.len() as u64 {
            findings.push(AuditFinding::new(
                Some(*b),
                AuditStage::Structure,
                "encapsulated key for a block that does not exist",
            ));
        }
    }

    for (pos, block) in chain.blocks().iter().enumerate() {
        let b = pos as u64 + 1;
        let Some(key) = state.keys.get(&b) else {
            findings.push(AuditFinding::new(Some(b), AuditStage::MissingKey, "no encapsulated key"));
            continue;
        };
        let i = params.control_index(b);
        let Some(shard) = state.shards.get(i) else {
            findings.push(AuditFinding::new(
                Some(b),
                AuditStage::Control,
                format!("masking shard {i} missing"),
            ));
            continue;
        };
        if B::pair(shard, &key.value) != *block.control() {
            findings.push(AuditFinding::new(
                Some(b),
                AuditStage::Control,
                format!("control shard does not match e(shard {i}, encapsulated key)"),
            ));
        }
    }

    AuditReport {
        checked: chain.len(),
        findings,
    }
}
