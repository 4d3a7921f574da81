//! File Keeper: setup, tokens, epoch updates and hand-over to a successor.

use rand::RngCore;

use super::{
    check_epoch, pieces_for, EncapsulatedKey, EncryptionToken, LedgerParams, MaskingShards,
    ProtocolError, SetupRequest,
};
use crate::bilinear::{pad_width, scalar_div, BilinearGroup};
use crate::digest::HashId;

/// The keeper's only long-lived secret: the time-key `s_t` of one epoch.
///
/// Deliberately not `Clone`. Advancing the epoch consumes the value, so an
/// old time-key cannot outlive its update.
pub struct KeeperSecret<B: BilinearGroup> {
    pub(crate) epoch: u64,
    pub(crate) time_key: B::Scalar,
}

impl<B: BilinearGroup> std::fmt::Debug for KeeperSecret<B> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeeperSecret")
            .field("epoch", &self.epoch)
            .finish_non_exhaustive()
    }
}

impl<B: BilinearGroup> KeeperSecret<B> {
    pub(crate) fn new(epoch: u64, time_key: B::Scalar) -> Self {
        KeeperSecret { epoch, time_key }
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    /// Starts the transition to epoch `j+1` with a fresh time-key.
    pub fn begin_update<R: RngCore + ?Sized>(self, rng: &mut R) -> EpochStep<B> {
        let mut next = B::scalar_random(rng);
        while next == self.time_key {
            next = B::scalar_random(rng);
        }
        EpochStep::new(self, next)
    }

    /// `k_{l,0,t} = q^{1/s_t}`.
    pub fn issue_token(&self, public_key: &B::G2) -> Result<EncryptionToken<B>, ProtocolError> {
        if *public_key == B::g2_identity() {
            return Err(ProtocolError::IdentityPublicKey);
        }
        let inv = B::scalar_inv(&self.time_key)?;
        Ok(EncryptionToken {
            epoch: self.epoch,
            value: B::g2_exp(public_key, &inv),
        })
    }
}

/// Both time-keys of one update, alive only for its duration.
pub struct EpochStep<B: BilinearGroup> {
    from: KeeperSecret<B>,
    to: KeeperSecret<B>,
    /// `s_{j+1} / s_j`, applied to shards.
    shard_ratio: B::Scalar,
    /// `s_j / s_{j+1}`, applied to encapsulated keys.
    key_ratio: B::Scalar,
}

impl<B: BilinearGroup> EpochStep<B> {
    pub(crate) fn new(from: KeeperSecret<B>, next_key: B::Scalar) -> Self {
        let shard_ratio =
            scalar_div::<B>(&next_key, &from.time_key).expect("time-keys are never zero");
        let key_ratio =
            scalar_div::<B>(&from.time_key, &next_key).expect("time-keys are never zero");
        let to = KeeperSecret::new(from.epoch + 1, next_key);
        EpochStep {
            from,
            to,
            shard_ratio,
            key_ratio,
        }
    }

    pub fn from_epoch(&self) -> u64 {
        self.from.epoch
    }

    pub fn to_epoch(&self) -> u64 {
        self.to.epoch
    }

    /// `ε_{i,t_{j+1}} = ε_{i,t_j}^{s_{j+1}/s_j}`.
    pub fn update_shards(&self, shards: &MaskingShards<B>) -> Result<MaskingShards<B>, ProtocolError> {
        check_epoch(self.from.epoch, shards.epoch)?;
        Ok(MaskingShards {
            epoch: self.to.epoch,
            shards: shards
                .shards
                .iter()
                .map(|e| B::g1_exp(e, &self.shard_ratio))
                .collect(),
        })
    }

    /// `k_{b,1,t_{j+1}} = k_{b,1,t_j}^{s_j/s_{j+1}}`.
    pub fn update_encapsulated(
        &self,
        key: &EncapsulatedKey<B>,
    ) -> Result<EncapsulatedKey<B>, ProtocolError> {
        check_epoch(self.from.epoch, key.epoch)?;
        Ok(EncapsulatedKey {
            block: key.block,
            epoch: self.to.epoch,
            value: B::g2_exp(&key.value, &self.key_ratio),
        })
    }

    /// Completes the update; the previous time-key is dropped here.
    pub fn finish(self) -> KeeperSecret<B> {
        self.to
    }

    /// Abandons the update and returns the unchanged secret.
    pub fn abort(self) -> KeeperSecret<B> {
        self.from
    }
}

/// Sets up a fresh ledger: parameters, epoch-0 shards and the epoch-0 time-key.
///
/// The shard exponents `u_i` exist only inside this call.
pub fn keeper_setup<B: BilinearGroup, R: RngCore + ?Sized>(
    request: SetupRequest,
    rng: &mut R,
) -> Result<(LedgerParams, MaskingShards<B>, KeeperSecret<B>), ProtocolError> {
    let params = setup_params::<B>(request)?;
    let exponents: Vec<B::Scalar> = (0..params.shard_count)
        .map(|_| B::scalar_random(rng))
        .collect();
    let time_key = B::scalar_random(rng);
    let (shards, secret) = shards_from_exponents::<B>(&exponents, time_key);
    Ok((params, shards, secret))
}

pub(crate) fn setup_params<B: BilinearGroup>(
    request: SetupRequest,
) -> Result<LedgerParams, ProtocolError> {
    let shard_width = pad_width::<B>();
    if request.block_bytes < shard_width {
        return Err(ProtocolError::BlockTooSmall {
            block_bytes: request.block_bytes,
            shard_width,
        });
    }
    Ok(LedgerParams {
        group: B::description(),
        block_bytes: request.block_bytes,
        shard_count: pieces_for(request.block_bytes, shard_width),
        shard_width,
        hash: HashId::Sha256,
    })
}

/// `ε_{i,0} = g1^{u_i s_0}`.
pub(crate) fn shards_from_exponents<B: BilinearGroup>(
    exponents: &[B::Scalar],
    time_key: B::Scalar,
) -> (MaskingShards<B>, KeeperSecret<B>) {
    let g1 = B::g1_base();
    let shards = exponents
        .iter()
        .map(|u| B::g1_exp(&g1, &B::scalar_mul(u, &time_key)))
        .collect();
    (
        MaskingShards { epoch: 0, shards },
        KeeperSecret::new(0, time_key),
    )
}

/// The time-key passed to a successor keeper.
pub struct Handover<B: BilinearGroup> {
    pub(crate) secret: KeeperSecret<B>,
}

impl<B: BilinearGroup> Handover<B> {
    pub fn epoch(&self) -> u64 {
        self.secret.epoch
    }
}

impl<B: BilinearGroup> std::fmt::Debug for Handover<B> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Handover")
            .field("epoch", &self.secret.epoch)
            .finish_non_exhaustive()
    }
}

/// Confidential channel from a retiring keeper to its successor.
pub trait HandoverChannel<B: BilinearGroup> {
    fn deliver(&mut self, handover: Handover<B>);
}

impl<B: BilinearGroup, F: FnMut(Handover<B>)> HandoverChannel<B> for F {
    fn deliver(&mut self, handover: Handover<B>) {
        self(handover)
    }
}

/// A File Keeper role object.
///
/// Holds at most one live time-key. All epoch-changing operations take
/// `&mut self`, so token issuance can never interleave with an update.
#[derive(Debug)]
pub struct FileKeeper<B: BilinearGroup> {
    secret: Option<KeeperSecret<B>>,
}

impl<B: BilinearGroup> FileKeeper<B> {
    pub fn new(secret: KeeperSecret<B>) -> Self {
        FileKeeper {
            secret: Some(secret),
        }
    }

    /// Takes over from a retired keeper.
    pub fn from_handover(handover: Handover<B>) -> Self {
        Self::new(handover.secret)
    }

    pub fn is_retired(&self) -> bool {
        self.secret.is_none()
    }

    fn live(&self) -> Result<&KeeperSecret<B>, ProtocolError> {
        self.secret.as_ref().ok_or(ProtocolError::KeeperRetired)
    }

    pub fn epoch(&self) -> Result<u64, ProtocolError> {
        self.live().map(|s| s.epoch)
    }

    pub fn issue_token(&self, public_key: &B::G2) -> Result<EncryptionToken<B>, ProtocolError> {
        self.live()?.issue_token(public_key)
    }

    /// Runs one epoch update.
    ///
    /// `apply` receives the step holding both time-keys. If it fails, the
    /// keeper keeps its current time-key and nothing changes.
    pub fn advance<R, T, E>(
        &mut self,
        rng: &mut R,
        apply: impl FnOnce(&EpochStep<B>) -> Result<T, E>,
    ) -> Result<T, E>
    where
        R: RngCore + ?Sized,
        E: From<ProtocolError>,
    {
        let secret = self.secret.take().ok_or(ProtocolError::KeeperRetired)?;
        let step = secret.begin_update(rng);
        self.finish_step(step, apply)
    }

    pub(crate) fn finish_step<T, E>(
        &mut self,
        step: EpochStep<B>,
        apply: impl FnOnce(&EpochStep<B>) -> Result<T, E>,
    ) -> Result<T, E> {
        match apply(&step) {
            Ok(out) => {
                self.secret = Some(step.finish());
                Ok(out)
            }
            Err(e) => {
                self.secret = Some(step.abort());
                Err(e)
            }
        }
    }

    /// Updates the masking shards alone, for a ledger with no published files.
    pub fn update_shards<R: RngCore + ?Sized>(
        &mut self,
        shards: &MaskingShards<B>,
        rng: &mut R,
    ) -> Result<MaskingShards<B>, ProtocolError> {
        self.advance(rng, |step| step.update_shards(shards))
    }

    /// Passes the current time-key to a successor and erases it locally.
    pub fn rotate(&mut self, channel: &mut impl HandoverChannel<B>) -> Result<(), ProtocolError> {
        let secret = self.secret.take().ok_or(ProtocolError::KeeperRetired)?;
        channel.deliver(Handover { secret });
        Ok(())
    }

    /// Consumes the keeper and yields its secret, e.g. for persisting.
    pub fn into_secret(self) -> Result<KeeperSecret<B>, ProtocolError> {
        self.secret.ok_or(ProtocolError::KeeperRetired)
    }

    pub fn secret(&self) -> Result<&KeeperSecret<B>, ProtocolError> {
        self.live()
    }
}
