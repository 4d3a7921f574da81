//! Deterministic entry points that take secret exponents explicitly.
//!
//! These exist so tests can check protocol values against closed forms. Never
//! use them to build real ledgers: a caller-chosen exponent is not secret.

use crate::bilinear::BilinearGroup;
use crate::protocol::keeper::{setup_params, shards_from_exponents};
use crate::protocol::{
    EncryptedPayload, EncryptionToken, EpochStep, KeeperSecret, LedgerParams, MaskingShards,
    ProtocolError, ProviderKeypair, SetupRequest, UserKeypair,
};

/// Setup with caller-chosen shard exponents `u_i` and time-key `s_0`.
/// `exponents` must hold exactly `I` values.
pub fn setup_with_exponents<B: BilinearGroup>(
    request: SetupRequest,
    exponents: &[B::Scalar],
    time_key: B::Scalar,
) -> Result<(LedgerParams, MaskingShards<B>, KeeperSecret<B>), ProtocolError> {
    let params = setup_params::<B>(request)?;
    assert_eq!(exponents.len(), params.shard_count, "one exponent per shard");
    let (shards, secret) = shards_from_exponents::<B>(exponents, time_key);
    Ok((params, shards, secret))
}

pub fn keeper_from_time_key<B: BilinearGroup>(epoch: u64, time_key: B::Scalar) -> KeeperSecret<B> {
    KeeperSecret::new(epoch, time_key)
}

pub fn time_key<B: BilinearGroup>(secret: &KeeperSecret<B>) -> &B::Scalar {
    &secret.time_key
}

/// An update to a caller-chosen next time-key.
pub fn step_with_key<B: BilinearGroup>(from: KeeperSecret<B>, next: B::Scalar) -> EpochStep<B> {
    EpochStep::new(from, next)
}

pub fn user_from_exponents<B: BilinearGroup>(mu: B::Scalar, v: B::Scalar) -> UserKeypair<B> {
    UserKeypair::from_secrets(mu, v)
}

/// `(μ, v)`.
pub fn user_exponents<B: BilinearGroup>(user: &UserKeypair<B>) -> (&B::Scalar, &B::Scalar) {
    (&user.mu, &user.v)
}

pub fn provider_from_exponent<B: BilinearGroup>(d: B::Scalar) -> ProviderKeypair<B> {
    ProviderKeypair::from_secret(d)
}

/// Encryption with a caller-chosen session exponent `k_b`.
pub fn encrypt_with_session<B: BilinearGroup>(
    user: &UserKeypair<B>,
    token: &EncryptionToken<B>,
    shards: &MaskingShards<B>,
    message: &[u8],
    session: &B::Scalar,
) -> Result<EncryptedPayload<B>, ProtocolError> {
    user.encrypt_with_session(token, shards, message, session)
}
