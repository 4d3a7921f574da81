use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::*;
use crate::bilinear::{Bls12, Toy101};
use crate::ledger::{audit_chain, update_epoch};
use crate::protocol::FileKeeper;
use crate::testutil::Fixture;

fn toy(variant: ChainVariant, blocks: usize, seed: u64) -> (Fixture<Toy101>, ChaCha20Rng) {
    let mut r = ChaCha20Rng::seed_from_u64(seed);
    let mut f = Fixture::<Toy101>::new(4, variant, &mut r);
    for _ in 0..blocks {
        f.publish(&mut r);
    }
    (f, r)
}

#[test]
fn five_block_chains_round_trip() {
    for variant in [ChainVariant::Full, ChainVariant::Shrunk] {
        let (f, _) = toy(variant, 5, 1);
        let params = f.chain.params();
        let bytes = encode_chain(&f.chain);
        let back = decode_chain::<Toy101>(&bytes, params).unwrap();
        assert_eq!(back, f.chain);
        assert_eq!(encode_chain(&back), bytes);
        assert!(audit_chain(&back).passed());
    }
}

#[test]
fn params_round_trip_and_bind_backend() {
    let (f, _) = toy(ChainVariant::Full, 0, 2);
    let params = f.chain.params();
    let bytes = encode_params::<Toy101>(params);
    assert_eq!(decode_params::<Toy101>(&bytes).unwrap(), *params);
    assert!(matches!(decode_params::<Bls12>(&bytes), Err(CodecError::BackendMismatch { .. })));
    let h = peek_header(&bytes).unwrap();
    assert_eq!((h.kind, h.backend), (FileKind::Params, BackendId::ToyInteger));

    // I must follow from |B| and δ.
    let mut bad = params.clone();
    bad.shard_count += 1;
    assert!(matches!(decode_params::<Toy101>(&encode_params::<Toy101>(&bad)), Err(CodecError::Invalid { .. })));
}

#[test]
fn header_layout() {
    let (f, _) = toy(ChainVariant::Full, 0, 3);
    let bytes = encode_state(&f.state, f.chain.params());
    assert_eq!(&bytes[..8], &[b'S', b'H', b'L', b'G', 1, 0, FileKind::State.tag(), 2]);
    for tag in 1..=12 {
        assert_eq!(FileKind::from_tag(tag).unwrap().tag(), tag);
    }
    assert!(FileKind::from_tag(0).is_none() && FileKind::from_tag(13).is_none());
}

#[test]
fn unknown_major_version_is_rejected() {
    let (f, _) = toy(ChainVariant::Full, 1, 4);
    let mut bytes = encode_chain(&f.chain);
    bytes[4] = 2;
    assert!(matches!(
        decode_chain::<Toy101>(&bytes, f.chain.params()),
        Err(CodecError::UnsupportedVersion { major: 2, minor: 0 })
    ));
    bytes[4] = 1;
    bytes[5] = 9;
    // Minor revisions stay readable.
    assert!(peek_header(&bytes).is_ok());
    bytes[0] = b'X';
    assert!(matches!(peek_header(&bytes), Err(CodecError::BadMagic)));
}

#[test]
fn truncated_record_reports_offset() {
    let (f, _) = toy(ChainVariant::Full, 2, 5);
    let bytes = encode_chain(&f.chain);
    let cut = bytes.len() - 10;
    match decode_chain::<Toy101>(&bytes[..cut], f.chain.params()) {
        Err(CodecError::Truncated { offset, needed, available }) => {
            assert!(offset < cut && needed > available, "{offset} {needed} {available}");
        }
        other => panic!("{other:?}"),
    }
    let (prefix, failure) = decode_chain_prefix::<Toy101>(&bytes[..cut], f.chain.params()).unwrap();
    assert_eq!(prefix.len(), 1);
    assert_eq!(failure.unwrap().0, 2);
}

#[test]
fn bad_group_element_is_reported() {
    let (f, _) = toy(ChainVariant::Full, 0, 6);
    let mut bytes = encode_state(&f.state, f.chain.params());
    // First shard sits after header (8), params digest (32), epoch (8), count (4).
    bytes[52] = 200;
    match decode_state::<Toy101>(&bytes, f.chain.params()) {
        Err(CodecError::Element { offset: 52, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn trailing_bytes_are_rejected() {
    let (f, _) = toy(ChainVariant::Full, 0, 7);
    let mut bytes = encode_state(&f.state, f.chain.params());
    let len = bytes.len();
    bytes.push(0);
    assert!(matches!(
        decode_state::<Toy101>(&bytes, f.chain.params()),
        Err(CodecError::TrailingBytes { offset, count: 1 }) if offset == len
    ));
}

#[test]
fn state_round_trip_and_params_binding() {
    let (mut f, mut r) = toy(ChainVariant::Full, 4, 8);
    update_epoch(&mut f.state, &mut f.keeper, &mut r).unwrap();
    let params = f.chain.params().clone();
    let bytes = encode_state(&f.state, &params);
    assert_eq!(decode_state::<Toy101>(&bytes, &params).unwrap(), f.state);

    let mut other = params.clone();
    other.block_bytes = 8;
    other.shard_count = 8;
    assert!(matches!(decode_state::<Toy101>(&bytes, &other), Err(CodecError::ParamsMismatch)));
}

#[test]
fn equal_states_encode_identically() {
    let (f, _) = toy(ChainVariant::Full, 6, 9);
    let params = f.chain.params();
    let keys: Vec<_> = f.state.keys.values().cloned().collect();
    let reference = encode_state(&f.state, params);
    let mut r = ChaCha20Rng::seed_from_u64(99);
    for _ in 0..20 {
        let mut order = keys.clone();
        for i in (1..order.len()).rev() {
            order.swap(i, r.gen_range(0..=i));
        }
        let mut state = VariableState::new(f.state.shards.clone());
        for k in order {
            state.keys.insert(k.block, k);
        }
        assert_eq!(encode_state(&state, params), reference);
    }
}

#[test]
fn unsorted_state_keys_are_rejected() {
    let (f, _) = toy(ChainVariant::Full, 2, 10);
    let mut bytes = encode_state(&f.state, f.chain.params());
    // Two keys of 8 + 1 bytes each at the end: swap their block numbers.
    let n = bytes.len();
    let (a, b) = (n - 18, n - 9);
    bytes[a + 7] = 2;
    bytes[b + 7] = 1;
    assert!(matches!(decode_state::<Toy101>(&bytes, f.chain.params()), Err(CodecError::Invalid { .. })));
}

#[test]
fn key_material_round_trips() {
    let mut r = ChaCha20Rng::seed_from_u64(11);
    let (mut f, _) = toy(ChainVariant::Full, 1, 11);

    let user = &f.users[0];
    let public = UserPublic::<Toy101> {
        key: *user.public(),
        warranty_key: f.signer.verifying_key(),
    };
    assert_eq!(decode_user_public::<Toy101>(&encode_user_public(&public)).unwrap(), public);
    let (u2, s2) = decode_user_secret::<Toy101>(&encode_user_secret(user, &f.signer)).unwrap();
    assert_eq!(u2.public(), user.public());
    assert_eq!(s2.verifying_key(), f.signer.verifying_key());

    let provider = ProviderKeypair::<Toy101>::generate(&mut r);
    let p2 = decode_provider_secret::<Toy101>(&encode_provider_secret(&provider)).unwrap();
    assert_eq!(p2.public(), provider.public());
    assert_eq!(decode_provider_public::<Toy101>(&encode_provider_public::<Toy101>(provider.public())).unwrap(), *provider.public());

    let signer = decode_signer_secret::<Toy101>(&encode_signer_secret::<Toy101>(&f.signer)).unwrap();
    assert_eq!(signer.seed(), f.signer.seed());

    let unlocked = f.users[1].unlock(f.state.key(1).unwrap()).unwrap();
    let grant = SealedGrant::seal(&unlocked, provider.public(), &mut r).unwrap();
    assert_eq!(decode_grant::<Toy101>(&encode_grant(&grant)).unwrap(), grant);

    let entries = f.published[0].1.clone();
    assert_eq!(decode_payload::<Toy101>(&encode_payload::<Toy101>(&entries)).unwrap(), entries);

    let secret_bytes = encode_keeper_secret(f.keeper.secret().unwrap());
    let restored = decode_keeper_secret::<Toy101>(&secret_bytes).unwrap();
    assert_eq!(encode_keeper_secret(&restored), secret_bytes);

    let mut handover = None;
    f.keeper.rotate(&mut |h| handover = Some(h)).unwrap();
    let handover = handover.unwrap();
    let bytes = encode_handover(&handover);
    let successor = FileKeeper::from_handover(decode_handover::<Toy101>(&bytes).unwrap());
    assert_eq!(encode_keeper_secret(successor.secret().unwrap()), secret_bytes);
    assert!(matches!(decode_keeper_secret::<Toy101>(&bytes), Err(CodecError::WrongKind { .. })));
}

#[test]
fn production_backend_round_trip() {
    let mut r = ChaCha20Rng::seed_from_u64(12);
    let mut f = Fixture::<Bls12>::new(2 * 576, ChainVariant::Shrunk, &mut r);
    f.publish_message(b"some bytes", &mut r);
    let params = f.chain.params();
    assert_eq!(decode_params::<Bls12>(&encode_params::<Bls12>(params)).unwrap(), *params);
    let chain = encode_chain(&f.chain);
    assert_eq!(encode_chain(&decode_chain::<Bls12>(&chain, params).unwrap()), chain);
    let state = encode_state(&f.state, params);
    assert_eq!(encode_state(&decode_state::<Bls12>(&state, params).unwrap(), params), state);
}

#[test]
fn encoded_audit_names_unreadable_block() {
    let (f, _) = toy(ChainVariant::Full, 3, 13);
    let params = f.chain.params();
    let mut bytes = encode_chain(&f.chain);
    assert!(audit_encoded_chain::<Toy101>(&bytes, params).passed());
    let third = encode_chain_header(&f.chain).len()
        + encode_block(f.chain.block(1).unwrap()).len()
        + encode_block(f.chain.block(2).unwrap()).len();
    // The record's variant tag.
    bytes[third + 4] = 9;
    let report = audit_encoded_chain::<Toy101>(&bytes, params);
    assert_eq!(report.failed_blocks().into_iter().collect::<Vec<_>>(), [3]);
    bytes[9] ^= 1;
    let report = audit_encoded_chain::<Toy101>(&bytes, params);
    assert_eq!(report.findings[0].block, None);
}

#[test]
fn text_mirror_lists_fields() {
    let (f, _) = toy(ChainVariant::Shrunk, 2, 14);
    let text = text::chain_text(&f.chain);
    assert!(text.starts_with("variant shrunk\npow-difficulty 4\n"));
    assert!(text.contains(&format!("block 2\n  prev {}\n", f.chain.block(1).unwrap().block_hash().to_hex())));
    assert!(text.contains("  locator payloads/1\n"));
    let state = text::state_text(&f.state);
    assert_eq!(state.lines().count(), 1 + 4 + 2);
    assert!(text::params_text(f.chain.params()).contains("shards 4\n"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decoders_never_panic(data in prop::collection::vec(any::<u8>(), 0..256)) {
        let (f, _) = toy(ChainVariant::Full, 0, 0);
        let params = f.chain.params();
        let _ = decode_chain::<Toy101>(&data, params);
        let _ = decode_state::<Toy101>(&data, params);
        let _ = decode_params::<Toy101>(&data);
        let _ = decode_grant::<Toy101>(&data);
        let _ = decode_payload::<Toy101>(&data);
        let _ = decode_block::<Toy101>(&data);
    }

    #[test]
    fn chains_round_trip(seed in any::<u64>(), blocks in 0usize..8, shrunk in any::<bool>()) {
        let variant = if shrunk { ChainVariant::Shrunk } else { ChainVariant::Full };
        let (f, _) = toy(variant, blocks, seed);
        let params = f.chain.params();
        let bytes = encode_chain(&f.chain);
        prop_assert_eq!(decode_chain::<Toy101>(&bytes, params).unwrap(), f.chain.clone());
        let state = encode_state(&f.state, params);
        prop_assert_eq!(decode_state::<Toy101>(&state, params).unwrap(), f.state.clone());
        for block in f.chain.blocks() {
            prop_assert_eq!(&decode_block::<Toy101>(&encode_block(block)).unwrap(), block);
        }
    }

    #[test]
    fn single_bit_flips_are_detected(seed in any::<u64>(), pick in any::<u64>(), shrunk in any::<bool>()) {
        let variant = if shrunk { ChainVariant::Shrunk } else { ChainVariant::Full };
        let (f, _) = toy(variant, 4, seed);
        let mut bytes = encode_chain(&f.chain);
        let bit = (pick % (bytes.len() as u64 * 8)) as usize;
        bytes[bit / 8] ^= 1 << (bit % 8);
        prop_assert!(!audit_encoded_chain::<Toy101>(&bytes, f.chain.params()).passed(), "bit {}", bit);
    }
}
