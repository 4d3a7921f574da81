//! Immutability evidence attached to each block: an owner signature, a proof
//! of work, or a third-party signature over the block digest.

use ed25519_dalek::{Signature, Signer, SigningKey, VerifyingKey};
use rand::RngCore;
use serde::Serialize;
use thiserror::Error;

use crate::digest::{Digest, FieldHasher};

/// Highest accepted proof-of-work difficulty, in leading zero bits.
pub const MAX_POW_DIFFICULTY: u32 = 32;

const SIGNED_LEN: usize = 32 + 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WarrantyError {
    #[error("proof-of-work difficulty {0} exceeds the cap of {MAX_POW_DIFFICULTY} bits")]
    DifficultyTooHigh(u32),
    #[error("malformed {kind:?} warranty payload ({len} bytes)")]
    Malformed { kind: WarrantyKind, len: usize },
    #[error("signature does not verify")]
    BadSignature,
    #[error("proof of work has {found} leading zero bits, {required} required")]
    InsufficientWork { found: u32, required: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum WarrantyKind {
    UserSignature,
    ProofOfWork,
    ThirdPartySignature,
    None,
}

impl WarrantyKind {
    pub fn tag(self) -> u8 {
        match self {
            WarrantyKind::UserSignature => 1,
            WarrantyKind::ProofOfWork => 2,
            WarrantyKind::ThirdPartySignature => 3,
            WarrantyKind::None => 0,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Some(match tag {
            0 => WarrantyKind::None,
            1 => WarrantyKind::UserSignature,
            2 => WarrantyKind::ProofOfWork,
            3 => WarrantyKind::ThirdPartySignature,
            _ => return None,
        })
    }
}

/// Warranty as stored in a block.
///
/// Signature payloads are `verifying key (32) || signature (64)`; proof of
/// work stores the 8-byte big-endian nonce; `None` is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warranty {
    pub kind: WarrantyKind,
    pub payload: Vec<u8>,
}

impl Warranty {
    pub fn none() -> Self {
        Warranty {
            kind: WarrantyKind::None,
            payload: Vec::new(),
        }
    }

    /// Checks the warranty against the block digest it protects.
    pub fn verify(&self, target: &Digest, pow_difficulty: u32) -> Result<(), WarrantyError> {
        let malformed = || WarrantyError::Malformed {
            kind: self.kind,
            len: self.payload.len(),
        };
        match self.kind {
            WarrantyKind::None => {
                if self.payload.is_empty() {
                    Ok(())
                } else {
                    Err(malformed())
                }
            }
            WarrantyKind::ProofOfWork => {
                let nonce: [u8; 8] = self.payload.as_slice().try_into().map_err(|_| malformed())?;
                let found = pow_hash(target, u64::from_be_bytes(nonce)).leading_zero_bits();
                if found >= pow_difficulty {
                    Ok(())
                } else {
                    Err(WarrantyError::InsufficientWork {
                        found,
                        required: pow_difficulty,
                    })
                }
            }
            WarrantyKind::UserSignature | WarrantyKind::ThirdPartySignature => {
                if self.payload.len() != SIGNED_LEN {
                    return Err(malformed());
                }
                let (key, sig) = self.payload.split_at(32);
                let key = VerifyingKey::from_bytes(key.try_into().expect("32 bytes"))
                    .map_err(|_| WarrantyError::BadSignature)?;
                let sig = Signature::from_bytes(sig.try_into().expect("64 bytes"));
                key.verify_strict(target.as_bytes(), &sig)
                    .map_err(|_| WarrantyError::BadSignature)
            }
        }
    }

    /// The signer's verifying key, for signature warranties.
    pub fn signer(&self) -> Option<[u8; 32]> {
        match self.kind {
            WarrantyKind::UserSignature | WarrantyKind::ThirdPartySignature
                if self.payload.len() == SIGNED_LEN =>
            {
                self.payload[..32].try_into().ok()
            }
            _ => None,
        }
    }
}

/// Ed25519 key used to sign block digests.
#[derive(Clone)]
pub struct WarrantyKey(SigningKey);

impl std::fmt::Debug for WarrantyKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WarrantyKey({})", hex::encode(self.verifying_key()))
    }
}

impl WarrantyKey {
    pub fn generate<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        Self::from_seed(seed)
    }

    pub fn from_seed(seed: [u8; 32]) -> Self {
        WarrantyKey(SigningKey::from_bytes(&seed))
    }

    pub fn seed(&self) -> [u8; 32] {
        self.0.to_bytes()
    }

    pub fn verifying_key(&self) -> [u8; 32] {
        self.0.verifying_key().to_bytes()
    }

    fn sign(&self, kind: WarrantyKind, target: &Digest) -> Warranty {
        let sig = self.0.sign(target.as_bytes());
        let mut payload = Vec::with_capacity(SIGNED_LEN);
        payload.extend_from_slice(&self.verifying_key());
        payload.extend_from_slice(&sig.to_bytes());
        Warranty { kind, payload }
    }
}

/// The warranty to produce when appending a block.
#[derive(Debug, Clone, Copy)]
pub enum WarrantyRequest<'a> {
    UserSignature(&'a WarrantyKey),
    ProofOfWork,
    ThirdParty(&'a WarrantyKey),
    None,
}

impl WarrantyRequest<'_> {
    pub fn kind(&self) -> WarrantyKind {
        match self {
            WarrantyRequest::UserSignature(_) => WarrantyKind::UserSignature,
            WarrantyRequest::ProofOfWork => WarrantyKind::ProofOfWork,
            WarrantyRequest::ThirdParty(_) => WarrantyKind::ThirdPartySignature,
            WarrantyRequest::None => WarrantyKind::None,
        }
    }
}

pub fn sign_warranty(
    request: WarrantyRequest<'_>,
    target: &Digest,
    pow_difficulty: u32,
) -> Result<Warranty, WarrantyError> {
    Ok(match request {
        WarrantyRequest::UserSignature(key) => key.sign(WarrantyKind::UserSignature, target),
        WarrantyRequest::ThirdParty(key) => key.sign(WarrantyKind::ThirdPartySignature, target),
        WarrantyRequest::ProofOfWork => Warranty {
            kind: WarrantyKind::ProofOfWork,
            payload: mine_pow(target, pow_difficulty)?.to_be_bytes().to_vec(),
        },
        WarrantyRequest::None => Warranty::none(),
    })
}

pub fn verify_warranty(
    warranty: &Warranty,
    target: &Digest,
    pow_difficulty: u32,
) -> Result<(), WarrantyError> {
    warranty.verify(target, pow_difficulty)
}

/// `h(d || nonce)` with the nonce as 8 big-endian bytes.
pub fn pow_hash(target: &Digest, nonce: u64) -> Digest {
    FieldHasher::new()
        .field(target.as_bytes())
        .field(&nonce.to_be_bytes())
        .finish()
}

/// Smallest nonce whose work hash has at least `difficulty` leading zero bits.
pub fn mine_pow(target: &Digest, difficulty: u32) -> Result<u64, WarrantyError> {
    if difficulty > MAX_POW_DIFFICULTY {
        return Err(WarrantyError::DifficultyTooHigh(difficulty));
    }
    Ok((0u64..)
        .find(|n| pow_hash(target, *n).leading_zero_bits() >= difficulty)
        .expect("a 32-bit target is reachable"))
}

pub fn verify_pow(target: &Digest, nonce: u64, difficulty: u32) -> bool {
    difficulty <= MAX_POW_DIFFICULTY && pow_hash(target, nonce).leading_zero_bits() >= difficulty
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digest::hash;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn difficulty_zero_accepts_nonce_zero() {
        let d = hash(b"block");
        assert_eq!(mine_pow(&d, 0).unwrap(), 0);
        assert!(verify_pow(&d, 0, 0));
    }

    #[test]
    fn difficulty_eight() {
        let d = hash(b"block 8");
        let nonce = mine_pow(&d, 8).unwrap();
        assert!(verify_pow(&d, nonce, 8));
        // Independent check of the work hash layout.
        let mut pre = Vec::new();
        pre.extend_from_slice(&32u32.to_be_bytes());
        pre.extend_from_slice(d.as_bytes());
        pre.extend_from_slice(&8u32.to_be_bytes());
        pre.extend_from_slice(&nonce.to_be_bytes());
        assert_eq!(hash(&pre).0[0], 0);
        // Every smaller nonce fails, since the search is exhaustive from 0.
        assert!((0..nonce).all(|n| !verify_pow(&d, n, 8)));
    }

    #[test]
    fn difficulty_cap() {
        let d = hash(b"x");
        assert_eq!(mine_pow(&d, 33), Err(WarrantyError::DifficultyTooHigh(33)));
        assert!(!verify_pow(&d, 0, 33));
    }

    #[test]
    fn signature_binds_digest() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let key = WarrantyKey::generate(&mut rng);
        let d = hash(b"d_b");
        let w = sign_warranty(WarrantyRequest::UserSignature(&key), &d, 0).unwrap();
        assert_eq!(w.signer(), Some(key.verifying_key()));
        assert!(verify_warranty(&w, &d, 0).is_ok());
        let mut flipped = d;
        flipped.0[5] ^= 1;
        assert_eq!(verify_warranty(&w, &flipped, 0), Err(WarrantyError::BadSignature));

        let mut forged = w.clone();
        forged.payload[40] ^= 0x80;
        assert!(verify_warranty(&forged, &d, 0).is_err());
    }

    #[test]
    fn pow_warranty_round_trip() {
        let d = hash(b"pow");
        let w = sign_warranty(WarrantyRequest::ProofOfWork, &d, 6).unwrap();
        assert!(w.verify(&d, 6).is_ok());
        assert!(matches!(
            Warranty { payload: vec![1, 2], ..w }.verify(&d, 6),
            Err(WarrantyError::Malformed { .. })
        ));
    }
}
