//! On-disk ledger directory.
//!
//! ```text
//! DIR/params          parameters
//! DIR/chain           static chain, append-only
//! DIR/state           variable ledger snapshot
//! DIR/keys/NAME.pub   public keys
//! DIR/secrets/NAME    secret material, one file per actor
//! DIR/payloads/B      off-ledger payloads of shrunk blocks
//! ```
//!
//! Every write goes to a temporary file that is renamed into place, so a
//! reader sees either the old or the new content.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::CodecError;

pub const PARAMS: &str = "params";
pub const CHAIN: &str = "chain";
pub const STATE: &str = "state";
pub const KEYS_DIR: &str = "keys";
pub const SECRETS_DIR: &str = "secrets";
pub const PAYLOADS_DIR: &str = "payloads";
const LOCK: &str = ".lock";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{} not found", .0.display())]
    NotFound(PathBuf),
    #[error("{} already exists", .0.display())]
    Exists(PathBuf),
    #[error("refusing to rewrite existing chain records")]
    NotAppendOnly,
    #[error("invalid name {0:?}: use letters, digits, '-' and '_'")]
    BadName(String),
    #[error("{}: {source}", path.display())]
    Codec {
        path: PathBuf,
        #[source]
        source: CodecError,
    },
}

impl StoreError {
    pub fn codec(path: impl Into<PathBuf>, source: CodecError) -> Self {
        StoreError::Codec {
            path: path.into(),
            source,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| {
        if source.kind() == io::ErrorKind::NotFound {
            StoreError::NotFound(path.to_path_buf())
        } else {
            StoreError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    }
}

/// Names used for key and secret files.
pub fn check_name(name: &str) -> Result<(), StoreError> {
    let ok = !name.is_empty()
        && name.len() <= 64
        && name
            .bytes()
            .all(|c| c.is_ascii_alphanumeric() || c == b'-' || c == b'_');
    if ok {
        Ok(())
    } else {
        Err(StoreError::BadName(name.to_string()))
    }
}

/// Exclusive advisory lock on a ledger directory, released on drop.
#[derive(Debug)]
pub struct StoreLock {
    _file: File,
}

#[derive(Debug, Clone)]
pub struct LedgerStore {
    root: PathBuf,
}

impl LedgerStore {
    /// Prepares an empty ledger directory. Fails if a ledger is already there.
    pub fn create(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let store = LedgerStore { root: root.into() };
        let params = store.path(PARAMS);
        if params.exists() {
            return Err(StoreError::Exists(params));
        }
        for dir in [KEYS_DIR, SECRETS_DIR, PAYLOADS_DIR] {
            let p = store.path(dir);
            fs::create_dir_all(&p).map_err(io_err(&p))?;
        }
        Ok(store)
    }

    /// Opens an existing ledger directory.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let store = LedgerStore { root: root.into() };
        let params = store.path(PARAMS);
        if !params.is_file() {
            return Err(StoreError::NotFound(params));
        }
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: impl AsRef<Path>) -> PathBuf {
        self.root.join(rel)
    }

    /// Location of a public key, relative to the ledger root.
    pub fn public_key_path(&self, name: &str) -> Result<PathBuf, StoreError> {
        check_name(name)?;
        Ok(Path::new(KEYS_DIR).join(format!("{name}.pub")))
    }

    /// Location of a secret, relative to the ledger root.
    pub fn secret_path(&self, name: &str) -> Result<PathBuf, StoreError> {
        check_name(name)?;
        Ok(Path::new(SECRETS_DIR).join(name))
    }

    /// Location of a shrunk block's payload, relative to the ledger root.
    pub fn payload_path(&self, block: u64) -> PathBuf {
        Path::new(PAYLOADS_DIR).join(block.to_string())
    }

    /// Blocks until this process holds the directory lock.
    pub fn lock(&self) -> Result<StoreLock, StoreError> {
        let path = self.path(LOCK);
        let file = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&path)
            .map_err(io_err(&path))?;
        file.lock().map_err(io_err(&path))?;
        Ok(StoreLock { _file: file })
    }

    pub fn read(&self, rel: impl AsRef<Path>) -> Result<Vec<u8>, StoreError> {
        read_file(&self.path(rel))
    }

    pub fn exists(&self, rel: impl AsRef<Path>) -> bool {
        self.path(rel).exists()
    }

    pub fn write(&self, rel: impl AsRef<Path>, bytes: &[u8]) -> Result<(), StoreError> {
        write_atomic(&self.path(rel), bytes)
    }

    /// Like [`write`](Self::write) but refuses to replace an existing file.
    pub fn write_new(&self, rel: impl AsRef<Path>, bytes: &[u8]) -> Result<(), StoreError> {
        let path = self.path(rel);
        if path.exists() {
            return Err(StoreError::Exists(path));
        }
        write_atomic(&path, bytes)
    }

    /// Replaces the chain file, which must keep the current content as a prefix.
    pub fn write_chain(&self, bytes: &[u8]) -> Result<(), StoreError> {
        let path = self.path(CHAIN);
        match fs::read(&path) {
            Ok(old) if !bytes.starts_with(&old) => return Err(StoreError::NotAppendOnly),
            Ok(_) => {}
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(io_err(&path)(e)),
        }
        write_atomic(&path, bytes)
    }

    pub fn remove(&self, rel: impl AsRef<Path>) -> Result<(), StoreError> {
        let path = self.path(rel);
        fs::remove_file(&path).map_err(io_err(&path))
    }
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, StoreError> {
    fs::read(path).map_err(io_err(path))
}

/// Writes `bytes` to a sibling temporary file, syncs it and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err(path))
}
