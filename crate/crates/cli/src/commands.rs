use std::path::Path;

use serde_json::{json, Value};
use shard_ledger::bilinear::{BackendId, BilinearGroup, Bls12, Toy101};
use shard_ledger::codec::store::{self, LedgerStore, CHAIN, PARAMS, STATE};
use shard_ledger::codec::{self, text, FileKind, UserPublic};
use shard_ledger::ledger::{
    audit_variable_state, entries_digest, update_epoch, AppendRequest, AuditFinding, AuditReport,
    AuditStage, Block, Chain, ChainVariant, VariableState, WarrantyKey, WarrantyKind,
    WarrantyRequest,
};
use shard_ledger::protocol::{
    keeper_setup, provider_decrypt, ProviderKeypair, SealedGrant, SetupRequest, UserKeypair,
};

use crate::error::{Class, CliError};
use crate::workspace::{command_rng, decode, decode_path, read_config, Workspace, CONFIG, KEEPER, WITNESS};
use crate::{Backend, Cli, Command, InspectTarget, Result, Role, WarrantyArg};

pub fn run(cli: &Cli) -> Result<()> {
    if let Command::Init { backend, .. } = &cli.command {
        return match backend {
            Backend::Production => init::<Bls12>(cli),
            Backend::Toy => init::<Toy101>(cli),
        };
    }
    let store = LedgerStore::open(&cli.ledger).map_err(|e| {
        CliError::new(
            Class::NotFound,
            format!("{e}; create a ledger with `init --ledger {}`", cli.ledger.display()),
        )
    })?;
    let _lock = store.lock()?;
    let header = decode(&store, PARAMS, codec::peek_header)?;
    if header.kind != FileKind::Params {
        return Err(CliError::new(Class::Codec, "params file has the wrong kind"));
    }
    match header.backend {
        BackendId::Bls12_381 => dispatch::<Bls12>(cli, store),
        BackendId::ToyInteger => dispatch::<Toy101>(cli, store),
    }
}

fn dispatch<B: BilinearGroup>(cli: &Cli, store: LedgerStore) -> Result<()> {
    match &cli.command {
        Command::Init { .. } => unreachable!("handled before opening"),
        Command::Keygen { role, name } => keygen::<B>(cli, store, *role, name),
        Command::Publish {
            user,
            file,
            warranty,
        } => publish::<B>(cli, store, user, file, *warranty),
        Command::Update => update::<B>(cli, store),
        Command::Grant {
            user,
            block,
            provider,
            out,
        } => grant::<B>(cli, store, user, *block, provider, out),
        Command::Decrypt {
            provider,
            block,
            grant,
            out,
        } => decrypt::<B>(cli, store, provider, *block, grant, out),
        Command::Audit => audit::<B>(cli, store),
        Command::RotateKeeper => rotate_keeper::<B>(cli, store),
        Command::ExportSecret { name } => export_secret(cli, store, name),
        Command::Inspect { what } => inspect::<B>(cli, store, *what),
    }
}

fn emit(cli: &Cli, text: impl AsRef<str>, value: Value) {
    if cli.json {
        println!("{value}");
    } else {
        print!("{}", text.as_ref());
    }
}

fn backend_id<B: BilinearGroup>() -> BackendId {
    B::description().backend
}

fn init<B: BilinearGroup>(cli: &Cli) -> Result<()> {
    let Command::Init {
        block_bytes,
        warranty,
        pow_difficulty,
        shrunk,
        ..
    } = &cli.command
    else {
        unreachable!()
    };
    if cli.seed.is_some() && backend_id::<B>() != BackendId::ToyInteger {
        return Err(CliError::new(Class::Usage, "--seed is only allowed with the toy backend"));
    }
    let store = LedgerStore::create(&cli.ledger)?;
    let _lock = store.lock()?;
    let mut rng = command_rng(cli, backend_id::<B>(), &store, "init")?;

    let (params, shards, secret) =
        keeper_setup::<B, _>(SetupRequest { block_bytes: *block_bytes }, &mut rng)?;
    let variant = if *shrunk { ChainVariant::Shrunk } else { ChainVariant::Full };
    let chain = Chain::<B>::new(params.clone(), variant, *pow_difficulty)
        .map_err(|e| CliError::new(Class::Usage, e.to_string()))?;
    let state = VariableState::new(shards);

    if *warranty == WarrantyArg::ThirdParty {
        let witness = WarrantyKey::generate(&mut rng);
        store.write_new(store.secret_path(WITNESS)?, &codec::encode_signer_secret::<B>(&witness))?;
    }
    store.write_new(store.secret_path(KEEPER)?, &codec::encode_keeper_secret(&secret))?;
    store.write_new(CONFIG, format!("warranty {}\n", warranty.name()).as_bytes())?;
    store.write_new(STATE, &codec::encode_state(&state, &params))?;
    store.write_chain(&codec::encode_chain(&chain))?;
    // Written last: its presence marks the directory as a ledger.
    store.write_new(PARAMS, &codec::encode_params::<B>(&params))?;

    let g = &params.group;
    emit(
        cli,
        format!(
            "initialized {} ledger at {}\n  group order: {} bits\n  shards (I): {}\n  shard width: {} bytes\n  capacity: {} bytes per block\n  chain: {}, warranty {}\n",
            g.backend.name(),
            cli.ledger.display(),
            g.order_bits(),
            params.shard_count,
            params.shard_width,
            params.capacity(),
            if *shrunk { "shrunk" } else { "full" },
            warranty.name(),
        ),
        json!({
            "backend": g.backend.name(),
            "order_bits": g.order_bits(),
            "shards": params.shard_count,
            "shard_width": params.shard_width,
            "block_bytes": params.block_bytes,
            "variant": if *shrunk { "shrunk" } else { "full" },
            "warranty": warranty.name(),
            "pow_difficulty": pow_difficulty,
        }),
    );
    Ok(())
}

fn keygen<B: BilinearGroup>(cli: &Cli, store: LedgerStore, role: Role, name: &str) -> Result<()> {
    if name == KEEPER || name == WITNESS {
        return Err(CliError::new(Class::Usage, format!("{name:?} is reserved")));
    }
    let public_path = store.public_key_path(name)?;
    let secret_path = store.secret_path(name)?;
    for p in [&public_path, &secret_path] {
        if store.exists(p) {
            return Err(CliError::new(Class::Exists, format!("identity {name:?} already exists")));
        }
    }
    let mut rng = command_rng(cli, backend_id::<B>(), &store, &format!("keygen {name}"))?;
    let (public_bytes, secret_bytes, public_hex) = match role {
        Role::User => {
            let user = UserKeypair::<B>::generate(&mut rng);
            let signer = WarrantyKey::generate(&mut rng);
            let public = UserPublic::<B> {
                key: user.public().clone(),
                warranty_key: signer.verifying_key(),
            };
            (
                codec::encode_user_public(&public),
                codec::encode_user_secret(&user, &signer),
                hex::encode(B::encode_g2(user.public())),
            )
        }
        Role::Provider => {
            let provider = ProviderKeypair::<B>::generate(&mut rng);
            (
                codec::encode_provider_public::<B>(provider.public()),
                codec::encode_provider_secret(&provider),
                hex::encode(B::encode_g2(provider.public())),
            )
        }
    };
    store.write_new(&secret_path, &secret_bytes)?;
    store.write_new(&public_path, &public_bytes)?;
    let role = match role {
        Role::User => "user",
        Role::Provider => "provider",
    };
    emit(
        cli,
        format!("created {role} {name}\n  public key: {public_hex}\n"),
        json!({ "role": role, "name": name, "public_key": public_hex }),
    );
    Ok(())
}

fn publish<B: BilinearGroup>(
    cli: &Cli,
    store: LedgerStore,
    user_name: &str,
    file: &Path,
    warranty: Option<WarrantyArg>,
) -> Result<()> {
    let mut ws = Workspace::<B>::load(store)?;
    let warranty = match warranty {
        Some(w) => w,
        None => read_config(&ws.store)?,
    };
    let (user, signer) = ws.user(user_name)?;
    let message = store::read_file(file)?;
    let keeper = ws.keeper()?;
    let mut rng = command_rng(cli, backend_id::<B>(), &ws.store, &format!("publish {user_name}"))?;

    let token = keeper.issue_token(user.public())?;
    let payload = user.encrypt(&token, &ws.state.shards, &message, &mut rng)?;
    let witness;
    let request = match warranty {
        WarrantyArg::Sig => WarrantyRequest::UserSignature(&signer),
        WarrantyArg::Pow => WarrantyRequest::ProofOfWork,
        WarrantyArg::ThirdParty => {
            witness = ws.witness()?;
            WarrantyRequest::ThirdParty(&witness)
        }
        WarrantyArg::None => WarrantyRequest::None,
    };
    let index = ws.chain.len() as u64 + 1;
    let locator = ws.store.payload_path(index);
    let block = ws
        .chain
        .append(
            &mut ws.state,
            &payload,
            AppendRequest {
                warranty: request,
                owner: Some(user_name.to_string()),
                locator: Some(format!("{}/{index}", store::PAYLOADS_DIR)),
            },
        )?
        .clone();
    if block.variant() == ChainVariant::Shrunk {
        ws.store.write(&locator, &codec::encode_payload::<B>(&payload.entries))?;
    }
    ws.save_chain()?;
    ws.save_state()?;

    emit(
        cli,
        format!(
            "published {} bytes as block {index}\n  shards: {}\n  epoch: {}\n  digest: {}\n  warranty: {}\n",
            message.len(),
            payload.entries.len(),
            payload.epoch,
            block.digest().to_hex(),
            warranty.name(),
        ),
        json!({
            "block": index,
            "bytes": message.len(),
            "shards": payload.entries.len(),
            "epoch": payload.epoch,
            "digest": block.digest().to_hex(),
            "block_hash": block.block_hash().to_hex(),
            "warranty": warranty.name(),
        }),
    );
    Ok(())
}

fn update<B: BilinearGroup>(cli: &Cli, store: LedgerStore) -> Result<()> {
    let mut ws = Workspace::<B>::load(store)?;
    let mut keeper = ws.keeper()?;
    let mut rng = command_rng(cli, backend_id::<B>(), &ws.store, "update")?;
    update_epoch(&mut ws.state, &mut keeper, &mut rng)?;
    // Keeper first: a crash between the two writes then shows up as an epoch
    // mismatch on the next update instead of silently corrupted shards.
    ws.save_keeper(keeper.secret()?)?;
    ws.save_state()?;
    let epoch = ws.state.epoch();
    emit(
        cli,
        format!(
            "advanced to epoch {epoch}: {} shards and {} encapsulated keys re-keyed; earlier grants are revoked\n",
            ws.state.shards.len(),
            ws.state.keys.len()
        ),
        json!({ "epoch": epoch, "shards": ws.state.shards.len(), "keys": ws.state.keys.len() }),
    );
    Ok(())
}

fn grant<B: BilinearGroup>(
    cli: &Cli,
    store: LedgerStore,
    user_name: &str,
    b: u64,
    provider_name: &str,
    out: &Path,
) -> Result<()> {
    let ws = Workspace::<B>::load(store)?;
    let block = ws
        .chain
        .block(b)
        .ok_or_else(|| CliError::new(Class::NotFound, format!("no block {b}; the chain has {} blocks", ws.chain.len())))?;
    if block.owner() != Some(user_name) {
        return Err(CliError::new(
            Class::State,
            format!(
                "block {b} belongs to {}, not {user_name}",
                block.owner().unwrap_or("an unnamed owner")
            ),
        ));
    }
    let (user, _) = ws.user(user_name)?;
    let provider = ws.provider_public(provider_name)?;
    let key = ws
        .state
        .key(b)
        .ok_or_else(|| CliError::new(Class::NotFound, format!("no encapsulated key for block {b}")))?;
    let mut rng = command_rng(cli, backend_id::<B>(), &ws.store, &format!("grant {b} {provider_name}"))?;
    let unlocked = user.unlock(key)?;
    let sealed = SealedGrant::seal(&unlocked, &provider, &mut rng)?;
    store::write_atomic(out, &codec::encode_grant(&sealed))?;
    emit(
        cli,
        format!(
            "granted block {b} to {provider_name} for epoch {}\n  grant: {}\n",
            sealed.epoch,
            out.display()
        ),
        json!({ "block": b, "provider": provider_name, "epoch": sealed.epoch, "grant": out.display().to_string() }),
    );
    Ok(())
}

fn decrypt<B: BilinearGroup>(
    cli: &Cli,
    store: LedgerStore,
    provider_name: &str,
    b: u64,
    grant_path: &Path,
    out: &Path,
) -> Result<()> {
    let ws = Workspace::<B>::load(store)?;
    let provider = ws.provider(provider_name)?;
    let sealed = decode_path(grant_path, codec::decode_grant::<B>)?;
    if sealed.block != b {
        return Err(CliError::new(
            Class::State,
            format!("grant is for block {}, not block {b}", sealed.block),
        ));
    }
    let block = ws
        .chain
        .block(b)
        .ok_or_else(|| CliError::new(Class::NotFound, format!("no block {b}")))?;
    let epoch = ws.state.epoch();
    if sealed.epoch != epoch {
        eprintln!(
            "warning: grant was issued at epoch {}, the ledger is at epoch {epoch}; decryption is expected to fail",
            sealed.epoch
        );
    }
    let external = match block {
        Block::Full(_) => None,
        Block::Shrunk(_) => Some(decode(&ws.store, ws.store.payload_path(b), codec::decode_payload::<B>)?),
    };
    let entries = ws.chain.entries_for(b, external.as_deref())?;
    let key = provider.open_grant(&sealed);
    let plaintext = provider_decrypt(entries, &ws.state.shards, &key, block.message_len())?;
    store::write_atomic(out, &plaintext)?;
    emit(
        cli,
        format!(
            "decrypted block {b}: {} bytes, all {} shard checks passed\n  output: {}\n",
            plaintext.len(),
            entries.len(),
            out.display()
        ),
        json!({ "block": b, "bytes": plaintext.len(), "shards": entries.len(), "output": out.display().to_string() }),
    );
    Ok(())
}

fn finding(block: Option<u64>, stage: AuditStage, detail: impl Into<String>) -> AuditFinding {
    AuditFinding {
        block,
        stage,
        detail: detail.into(),
        expected: None,
        actual: None,
    }
}

fn audit<B: BilinearGroup>(cli: &Cli, store: LedgerStore) -> Result<()> {
    let params = decode(&store, PARAMS, codec::decode_params::<B>)?;
    let chain_bytes = store.read(CHAIN)?;
    let mut report = codec::audit_encoded_chain::<B>(&chain_bytes, &params);
    if let Ok((chain, _)) = codec::decode_chain_prefix::<B>(&chain_bytes, &params) {
        report.findings.extend(owner_findings(&store, &chain));
        match decode(&store, STATE, |b| codec::decode_state::<B>(b, &params)) {
            Ok(state) => report = report.merge(audit_variable_state(&chain, &state)),
            Err(e) => report.findings.push(finding(None, AuditStage::Structure, format!("state unreadable: {e}"))),
        }
    }
    emit(cli, report.to_string(), audit_json(&report));
    if report.passed() {
        Ok(())
    } else {
        let blocks: Vec<String> = report.failed_blocks().iter().map(u64::to_string).collect();
        let msg = if blocks.is_empty() {
            "audit failed".to_string()
        } else {
            format!("audit failed for block(s) {}", blocks.join(", "))
        };
        Err(CliError::new(Class::Audit, msg))
    }
}

fn audit_json(report: &AuditReport) -> Value {
    json!({
        "passed": report.passed(),
        "checked": report.checked,
        "failed_blocks": report.failed_blocks(),
        "findings": report.findings,
    })
}

/// Checks that owner signatures come from the named owner's published key
/// and that off-ledger payloads match their recorded digests.
fn owner_findings<B: BilinearGroup>(store: &LedgerStore, chain: &Chain<B>) -> Vec<AuditFinding> {
    let mut out = Vec::new();
    for block in chain.blocks() {
        let b = Some(block.index());
        if let (WarrantyKind::UserSignature, Some(owner)) = (block.warranty().kind, block.owner()) {
            let published = store
                .public_key_path(owner)
                .ok()
                .and_then(|p| store.read(p).ok())
                .and_then(|bytes| codec::decode_user_public::<B>(&bytes).ok());
            match published {
                None => out.push(finding(b, AuditStage::Warranty, format!("owner {owner:?} has no published key"))),
                Some(p) if block.warranty().signer() != Some(p.warranty_key) => out.push(finding(
                    b,
                    AuditStage::Warranty,
                    format!("signature is not from owner {owner:?}"),
                )),
                Some(_) => {}
            }
        }
        if let Block::Shrunk(s) = block {
            let payload = std::fs::read(store.path(&s.locator))
                .ok()
                .and_then(|bytes| codec::decode_payload::<B>(&bytes).ok());
            match payload {
                None => out.push(finding(b, AuditStage::Structure, format!("payload {} missing or unreadable", s.locator))),
                Some(entries) if entries_digest(&entries) != s.payload_digest => {
                    out.push(finding(b, AuditStage::Digest, format!("payload {} does not match its digest", s.locator)))
                }
                Some(_) => {}
            }
        }
    }
    out
}

fn rotate_keeper<B: BilinearGroup>(cli: &Cli, store: LedgerStore) -> Result<()> {
    let ws = Workspace::<B>::load(store)?;
    let mut retiring = ws.keeper()?;
    let mut handover = None;
    retiring.rotate(&mut |h| handover = Some(h))?;
    let handover = handover.expect("rotation delivers a handover");
    let epoch = handover.epoch();
    let successor = shard_ledger::protocol::FileKeeper::from_handover(handover);
    debug_assert!(retiring.is_retired());
    ws.save_keeper(successor.secret()?)?;
    emit(
        cli,
        format!("keeper rotated at epoch {epoch}; the previous keeper is retired\n"),
        json!({ "epoch": epoch, "rotated": true }),
    );
    Ok(())
}

fn export_secret(cli: &Cli, store: LedgerStore, name: &str) -> Result<()> {
    let bytes = store.read(store.secret_path(name)?)?;
    let kind = codec::peek_header(&bytes).map(|h| format!("{:?}", h.kind))?;
    let hex = hex::encode(&bytes);
    emit(cli, format!("{hex}\n"), json!({ "name": name, "kind": kind, "hex": hex }));
    Ok(())
}

fn inspect<B: BilinearGroup>(cli: &Cli, store: LedgerStore, what: InspectTarget) -> Result<()> {
    let ws = Workspace::<B>::load(store)?;
    let text = match what {
        InspectTarget::Params => text::params_text(&ws.params),
        InspectTarget::Chain => text::chain_text(&ws.chain),
        InspectTarget::State => text::state_text(&ws.state),
    };
    let value = json!({ "lines": text.lines().collect::<Vec<_>>() });
    emit(cli, &text, value);
    Ok(())
}
