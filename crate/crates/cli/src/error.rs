use std::fmt;
use std::process::ExitCode;

use shard_ledger::codec::store::StoreError;
use shard_ledger::codec::CodecError;
use shard_ledger::ledger::{LedgerError, WarrantyError};
use shard_ledger::protocol::ProtocolError;

/// Exit status per error class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Usage = 2,
    Io = 3,
    Codec = 4,
    State = 5,
    Integrity = 6,
    Audit = 7,
    NotFound = 8,
    Exists = 9,
}

#[derive(Debug)]
pub struct CliError {
    pub class: Class,
    pub message: String,
}

impl CliError {
    pub fn new(class: Class, message: impl Into<String>) -> Self {
        CliError {
            class,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.class as u8)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        let class = match &e {
            StoreError::Io { .. } => Class::Io,
            StoreError::NotFound(_) => Class::NotFound,
            StoreError::Exists(_) => Class::Exists,
            StoreError::NotAppendOnly => Class::State,
            StoreError::BadName(_) => Class::Usage,
            StoreError::Codec { .. } => Class::Codec,
        };
        CliError::new(class, e.to_string())
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        CliError::new(Class::Codec, e.to_string())
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::Integrity(fail) => {
                let failed = fail.failed();
                let mut msg = format!(
                    "integrity check failed on {} of {} shards ({})",
                    failed.len(),
                    fail.checks.len(),
                    failed.iter().map(u32::to_string).collect::<Vec<_>>().join(", ")
                );
                if fail.stale() {
                    msg.push_str(&format!(
                        "; the key is from epoch {} but the ledger is at epoch {}, ask the owner for a new grant",
                        fail.key_epoch, fail.shards_epoch
                    ));
                }
                CliError::new(Class::Integrity, msg)
            }
            e => CliError::new(Class::State, e.to_string()),
        }
    }
}

impl From<LedgerError> for CliError {
    fn from(e: LedgerError) -> Self {
        match e {
            LedgerError::Protocol(p) => p.into(),
            LedgerError::NoSuchBlock(_) | LedgerError::MissingKey(_) => {
                CliError::new(Class::NotFound, e.to_string())
            }
            LedgerError::PayloadMismatch(_) => CliError::new(Class::Integrity, e.to_string()),
            e => CliError::new(Class::State, e.to_string()),
        }
    }
}

impl From<WarrantyError> for CliError {
    fn from(e: WarrantyError) -> Self {
        CliError::new(Class::State, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(Class::Io, e.to_string())
    }
}
