//! Data owner: key generation, encryption, key encapsulation and unlocking.

use rand::RngCore;

use super::{
    pieces_for, xor_into, EncapsulatedKey, EncryptionToken, MaskingShards, ProtocolError,
    ShardEntry, UnlockedKey,
};
use crate::bilinear::{gt_to_pad, pad_width, scalar_div, BilinearGroup};
use crate::digest::hash;

/// A user's secret exponents `(μ, v)` and public key `q = g2^μ`.
pub struct UserKeypair<B: BilinearGroup> {
    pub(crate) mu: B::Scalar,
    pub(crate) v: B::Scalar,
    public: B::G2,
}

impl<B: BilinearGroup> std::fmt::Debug for UserKeypair<B> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UserKeypair")
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

/// Output of one encryption, ready for the keeper to place in block `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptedPayload<B: BilinearGroup> {
    /// Epoch of the token and shards used.
    pub epoch: u64,
    pub entries: Vec<ShardEntry>,
    /// Unpadded plaintext length in bytes.
    pub message_len: u64,
    /// `k_{b,1,t}`; the block index is assigned when the block is appended.
    pub encapsulated: B::G2,
}

impl<B: BilinearGroup> UserKeypair<B> {
    pub fn generate<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mu = B::scalar_random(rng);
        let v = B::scalar_random(rng);
        Self::from_secrets(mu, v)
    }

    pub(crate) fn from_secrets(mu: B::Scalar, v: B::Scalar) -> Self {
        UserKeypair {
            mu,
            v,
            public: B::g2_exp(&B::g2_base(), &mu),
        }
    }

    /// `q = g2^μ`.
    pub fn public(&self) -> &B::G2 {
        &self.public
    }

    /// Encrypts `message` into at most `I` shards.
    ///
    /// A fresh session exponent `k_b` is drawn and dropped before returning;
    /// it survives only inside the encapsulated key.
    pub fn encrypt<R: RngCore + ?Sized>(
        &self,
        token: &EncryptionToken<B>,
        shards: &MaskingShards<B>,
        message: &[u8],
        rng: &mut R,
    ) -> Result<EncryptedPayload<B>, ProtocolError> {
        let session = B::scalar_random(rng);
        self.encrypt_with_session(token, shards, message, &session)
    }

    pub(crate) fn encrypt_with_session(
        &self,
        token: &EncryptionToken<B>,
        shards: &MaskingShards<B>,
        message: &[u8],
        session: &B::Scalar,
    ) -> Result<EncryptedPayload<B>, ProtocolError> {
        if token.epoch != shards.epoch {
            return Err(ProtocolError::StaleToken {
                token: token.epoch,
                shards: shards.epoch,
            });
        }
        if message.is_empty() {
            return Err(ProtocolError::EmptyMessage);
        }
        let width = pad_width::<B>();
        let capacity = shards.len() * width;
        if message.len() > capacity {
            return Err(ProtocolError::MessageTooLong {
                len: message.len(),
                capacity,
            });
        }

        // (k_{l,0})^{k_b} is shared by every shard of the block.
        let masked_token = B::g2_exp(&token.value, session);
        let entries = message
            .chunks(width)
            .zip(&shards.shards)
            .enumerate()
            .map(|(k, (chunk, shard))| {
                let mut piece = chunk.to_vec();
                piece.resize(width, 0);
                let plaintext_digest = hash(&piece);
                let pad = gt_to_pad::<B>(&B::pair(shard, &masked_token));
                xor_into(&mut piece, &pad);
                ShardEntry {
                    index: k as u32 + 1,
                    ciphertext: piece,
                    plaintext_digest,
                }
            })
            .collect::<Vec<_>>();
        debug_assert_eq!(entries.len(), pieces_for(message.len(), width));

        // k_{b,1} = (k_{l,0})^{v k_b / μ}
        let exponent = scalar_div::<B>(&B::scalar_mul(&self.v, session), &self.mu)?;
        Ok(EncryptedPayload {
            epoch: token.epoch,
            entries,
            message_len: message.len() as u64,
            encapsulated: B::g2_exp(&token.value, &exponent),
        })
    }

    /// `k_{b,2,t} = k_{b,1,t}^{μ/v}`: an unlocked key valid for the key's epoch.
    pub fn unlock(&self, key: &EncapsulatedKey<B>) -> Result<UnlockedKey<B>, ProtocolError> {
        let ratio = scalar_div::<B>(&self.mu, &self.v)?;
        Ok(UnlockedKey {
            block: key.block,
            epoch: key.epoch,
            value: B::g2_exp(&key.value, &ratio),
        })
    }
}
