//! Public ledger for sensitive data.
//!
//! Users publish pad-encrypted files on an append-only, hash-chained ledger.
//! A File Keeper maintains a small updating section of masking shards and
//! encapsulated keys; re-keying it once per epoch revokes every outstanding
//! decryption grant at once, while anyone can audit both sections.

pub mod bilinear;
pub mod digest;
pub mod protocol;
pub mod ledger;
pub mod codec;

#[cfg(feature = "hazmat")]
pub mod hazmat;

#[cfg(test)]
mod testutil;
