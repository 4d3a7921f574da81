//! Service provider: grant opening and decryption.

use rand::RngCore;

use super::{
    pieces_for, xor_into, IntegrityFailure, MaskingShards, ProtocolError, ShardCheck, ShardEntry,
    UnlockedKey,
};
use crate::bilinear::{gt_to_pad, pad_width, BilinearGroup};
use crate::digest::hash;

/// Provider key pair: secret `d`, public `D = g2^d`.
pub struct ProviderKeypair<B: BilinearGroup> {
    pub(crate) secret: B::Scalar,
    public: B::G2,
}

impl<B: BilinearGroup> std::fmt::Debug for ProviderKeypair<B> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProviderKeypair")
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

impl<B: BilinearGroup> ProviderKeypair<B> {
    pub fn generate<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        Self::from_secret(B::scalar_random(rng))
    }

    pub(crate) fn from_secret(secret: B::Scalar) -> Self {
        ProviderKeypair {
            secret,
            public: B::g2_exp(&B::g2_base(), &secret),
        }
    }

    pub fn public(&self) -> &B::G2 {
        &self.public
    }

    /// Recovers `k2 = V * R^{-d}`.
    ///
    /// A grant sealed for another provider opens to an unrelated key; that is
    /// only noticed when decryption fails its digest checks.
    pub fn open_grant(&self, grant: &SealedGrant<B>) -> UnlockedKey<B> {
        let unmask = B::g2_exp(&grant.ephemeral, &B::scalar_neg(&self.secret));
        UnlockedKey {
            block: grant.block,
            epoch: grant.epoch,
            value: B::g2_op(&grant.masked, &unmask),
        }
    }
}

/// An unlocked key encrypted to one provider: `R = g2^r`, `V = k2 * D^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SealedGrant<B: BilinearGroup> {
    pub block: u64,
    pub epoch: u64,
    pub ephemeral: B::G2,
    pub masked: B::G2,
}

impl<B: BilinearGroup> SealedGrant<B> {
    pub fn seal<R: RngCore + ?Sized>(
        key: &UnlockedKey<B>,
        provider: &B::G2,
        rng: &mut R,
    ) -> Result<Self, ProtocolError> {
        if *provider == B::g2_identity() {
            return Err(ProtocolError::IdentityPublicKey);
        }
        let r = B::scalar_random(rng);
        Ok(SealedGrant {
            block: key.block,
            epoch: key.epoch,
            ephemeral: B::g2_exp(&B::g2_base(), &r),
            masked: B::g2_op(&key.value, &B::g2_exp(provider, &r)),
        })
    }
}

/// `m'_i = c_i XOR pad(e(ε_i, k2))`, accepted only if every `h(m'_i)` matches.
///
/// The key's epoch is not enforced: a stale key simply yields pads that fail
/// the digest checks, which is how revocation shows up.
pub fn provider_decrypt<B: BilinearGroup>(
    entries: &[ShardEntry],
    shards: &MaskingShards<B>,
    key: &UnlockedKey<B>,
    message_len: u64,
) -> Result<Vec<u8>, ProtocolError> {
    let width = pad_width::<B>();
    if entries.is_empty() || entries.len() > shards.len() {
        return Err(ProtocolError::MalformedPayload(format!(
            "{} entries for {} masking shards",
            entries.len(),
            shards.len()
        )));
    }
    let len = usize::try_from(message_len)
        .map_err(|_| ProtocolError::MalformedPayload("message length overflows".into()))?;
    if len == 0 || pieces_for(len, width) != entries.len() {
        return Err(ProtocolError::MalformedPayload(format!(
            "message length {len} does not fit {} shards",
            entries.len()
        )));
    }

    let mut plaintext = Vec::with_capacity(entries.len() * width);
    let mut checks = Vec::with_capacity(entries.len());
    for (k, (entry, shard)) in entries.iter().zip(&shards.shards).enumerate() {
        if entry.index as usize != k + 1 || entry.ciphertext.len() != width {
            return Err(ProtocolError::MalformedPayload(format!(
                "entry {} has index {} and {} bytes",
                k + 1,
                entry.index,
                entry.ciphertext.len()
            )));
        }
        let mut piece = entry.ciphertext.clone();
        xor_into(&mut piece, &gt_to_pad::<B>(&B::pair(shard, &key.value)));
        checks.push(ShardCheck {
            index: entry.index,
            ok: hash(&piece) == entry.plaintext_digest,
        });
        plaintext.extend_from_slice(&piece);
    }

    if checks.iter().all(|c| c.ok) {
        plaintext.truncate(len);
        Ok(plaintext)
    } else {
        Err(ProtocolError::Integrity(Box::new(IntegrityFailure {
            checks,
            key_epoch: key.epoch,
            shards_epoch: shards.epoch,
        })))
    }
}
