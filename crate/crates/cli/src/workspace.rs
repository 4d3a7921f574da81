//! Loading and saving ledger files for one command.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use shard_ledger::bilinear::{BackendId, BilinearGroup};
use shard_ledger::codec::store::{LedgerStore, StoreError, CHAIN, PARAMS, STATE};
use shard_ledger::codec::{self, CodecError};
use shard_ledger::digest::{hash, FieldHasher};
use shard_ledger::ledger::{Chain, VariableState, WarrantyKey};
use shard_ledger::protocol::{FileKeeper, KeeperSecret, LedgerParams, ProviderKeypair, UserKeypair};

use crate::error::{Class, CliError};
use crate::{Cli, Result, WarrantyArg};

pub const KEEPER: &str = "keeper";
pub const WITNESS: &str = "witness";
pub const CONFIG: &str = "config";

pub fn decode<T>(
    store: &LedgerStore,
    rel: impl AsRef<Path>,
    f: impl FnOnce(&[u8]) -> std::result::Result<T, CodecError>,
) -> Result<T> {
    let path = store.path(rel);
    decode_path(&path, f)
}

pub fn decode_path<T>(
    path: &Path,
    f: impl FnOnce(&[u8]) -> std::result::Result<T, CodecError>,
) -> Result<T> {
    let bytes = shard_ledger::codec::store::read_file(path)?;
    f(&bytes).map_err(|e| StoreError::codec(path, e).into())
}

/// The ledger's default warranty, recorded at init.
pub fn read_config(store: &LedgerStore) -> Result<WarrantyArg> {
    let text = String::from_utf8(store.read(CONFIG)?).unwrap_or_default();
    let value = text
        .lines()
        .find_map(|l| l.strip_prefix("warranty "))
        .unwrap_or("none");
    Ok(match value.trim() {
        "sig" => WarrantyArg::Sig,
        "pow" => WarrantyArg::Pow,
        "third-party" => WarrantyArg::ThirdParty,
        _ => WarrantyArg::None,
    })
}

/// Randomness for one command.
///
/// With `--seed` the stream is derived from the seed, the command label and
/// the current chain and state files, so replaying the same commands on the
/// same ledger reproduces it byte for byte.
pub fn command_rng(
    cli: &Cli,
    backend: BackendId,
    store: &LedgerStore,
    label: &str,
) -> Result<ChaCha20Rng> {
    let Some(seed) = &cli.seed else {
        return Ok(ChaCha20Rng::from_entropy());
    };
    if backend != BackendId::ToyInteger {
        return Err(CliError::new(
            Class::Usage,
            "--seed is only allowed with the toy backend",
        ));
    }
    let seed = hex::decode(seed)
        .map_err(|e| CliError::new(Class::Usage, format!("--seed is not hex: {e}")))?;
    let file_digest = |name| {
        store
            .read(name)
            .map(|b| hash(&b))
            .unwrap_or_default()
    };
    let derived = FieldHasher::new()
        .field(&seed)
        .field(label.as_bytes())
        .field(file_digest(CHAIN).as_bytes())
        .field(file_digest(STATE).as_bytes())
        .finish();
    Ok(ChaCha20Rng::from_seed(*derived.as_bytes()))
}

pub struct Workspace<B: BilinearGroup> {
    pub store: LedgerStore,
    pub params: LedgerParams,
    pub chain: Chain<B>,
    pub state: VariableState<B>,
}

impl<B: BilinearGroup> Workspace<B> {
    pub fn load(store: LedgerStore) -> Result<Self> {
        let params = decode(&store, PARAMS, codec::decode_params::<B>)?;
        let chain = decode(&store, CHAIN, |b| codec::decode_chain::<B>(b, &params))?;
        let state = decode(&store, STATE, |b| codec::decode_state::<B>(b, &params))?;
        Ok(Workspace {
            store,
            params,
            chain,
            state,
        })
    }

    pub fn save_chain(&self) -> Result<()> {
        Ok(self.store.write_chain(&codec::encode_chain(&self.chain))?)
    }

    pub fn save_state(&self) -> Result<()> {
        Ok(self
            .store
            .write(STATE, &codec::encode_state(&self.state, &self.params))?)
    }

    pub fn keeper(&self) -> Result<FileKeeper<B>> {
        let path = self.store.secret_path(KEEPER)?;
        let secret = decode(&self.store, path, codec::decode_keeper_secret::<B>)?;
        Ok(FileKeeper::new(secret))
    }

    pub fn save_keeper(&self, secret: &KeeperSecret<B>) -> Result<()> {
        let path = self.store.secret_path(KEEPER)?;
        Ok(self.store.write(path, &codec::encode_keeper_secret(secret))?)
    }

    pub fn user(&self, name: &str) -> Result<(UserKeypair<B>, WarrantyKey)> {
        let path = self.store.secret_path(name)?;
        self.missing_identity(&path, name, "user")?;
        decode(&self.store, &path, codec::decode_user_secret::<B>)
    }

    pub fn provider(&self, name: &str) -> Result<ProviderKeypair<B>> {
        let path = self.store.secret_path(name)?;
        self.missing_identity(&path, name, "provider")?;
        decode(&self.store, &path, codec::decode_provider_secret::<B>)
    }

    pub fn provider_public(&self, name: &str) -> Result<B::G2> {
        let path = self.store.public_key_path(name)?;
        self.missing_identity(&path, name, "provider")?;
        decode(&self.store, &path, codec::decode_provider_public::<B>)
    }

    pub fn witness(&self) -> Result<WarrantyKey> {
        let path = self.store.secret_path(WITNESS)?;
        decode(&self.store, &path, codec::decode_signer_secret::<B>)
    }

    fn missing_identity(&self, path: &Path, name: &str, role: &str) -> Result<()> {
        if self.store.exists(path) {
            Ok(())
        } else {
            Err(CliError::new(
                Class::NotFound,
                format!("no {role} named {name:?}; create one with `keygen --role {role} {name}`"),
            ))
        }
    }
}
