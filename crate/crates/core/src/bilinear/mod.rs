//! Bilinear group contract.
//!
//! Every protocol value lives in one of three prime-order groups joined by a
//! pairing `e: G1 x G2 -> GT`. The protocol code is written against the
//! [`BilinearGroup`] trait, so the same algebra runs on the production curve
//! ([`Bls12`]) and on a tiny exhaustively checkable integer model ([`Toy`]).
//!
//! Group operations use multiplicative naming (`*_op`, `*_exp`) regardless of
//! how a backend represents elements internally.

mod bls12;
mod toy;

use std::fmt::Debug;

use rand::RngCore;
use serde::Serialize;
use thiserror::Error;

pub use bls12::Bls12;
pub use toy::{Toy, Toy101, ToyElement, ToyScalar, ToyTarget};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BilinearError {
    #[error("scalar zero has no inverse")]
    ZeroInverse,
    #[error("invalid {kind} encoding: {reason}")]
    Decode { kind: ElementKind, reason: String },
}

impl BilinearError {
    pub(crate) fn decode(kind: ElementKind, reason: impl Into<String>) -> Self {
        BilinearError::Decode {
            kind,
            reason: reason.into(),
        }
    }
}

/// Which group (or the scalar field) an encoding belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ElementKind {
    Scalar,
    G1,
    G2,
    Gt,
}

impl std::fmt::Display for ElementKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ElementKind::Scalar => "scalar",
            ElementKind::G1 => "G1",
            ElementKind::G2 => "G2",
            ElementKind::Gt => "GT",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BackendId {
    /// BLS12-381, Type-3 pairing.
    Bls12_381,
    /// `Z_p` with `e(a, b) = a*b mod p`. Insecure; test oracle only.
    ToyInteger,
}

impl BackendId {
    pub fn tag(self) -> u8 {
        match self {
            BackendId::Bls12_381 => 1,
            BackendId::ToyInteger => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(BackendId::Bls12_381),
            2 => Some(BackendId::ToyInteger),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BackendId::Bls12_381 => "bls12-381",
            BackendId::ToyInteger => "toy",
        }
    }
}

/// Public description of a backend: its order and fixed encoding widths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupDescription {
    pub backend: BackendId,
    /// Group order `p`, big-endian without leading zeros.
    pub order: Vec<u8>,
    pub scalar_width: usize,
    pub g1_width: usize,
    pub g2_width: usize,
    pub gt_width: usize,
}

impl GroupDescription {
    pub fn order_bits(&self) -> usize {
        match self.order.first() {
            None => 0,
            Some(top) => (self.order.len() - 1) * 8 + (8 - top.leading_zeros() as usize),
        }
    }
}

/// A prime-order bilinear group triple with a non-degenerate pairing.
///
/// Implementors are zero-sized markers; all operations are associated
/// functions over the associated element types.
pub trait BilinearGroup: Debug + Clone + Copy + Send + Sync + 'static {
    type Scalar: Copy + Eq + Debug + Send + Sync;
    type G1: Clone + Eq + Debug + Send + Sync;
    type G2: Clone + Eq + Debug + Send + Sync;
    type Gt: Clone + Eq + Debug + Send + Sync;

    fn description() -> GroupDescription;

    fn g1_base() -> Self::G1;
    fn g2_base() -> Self::G2;

    fn pair(a: &Self::G1, b: &Self::G2) -> Self::Gt;

    fn scalar_from_u64(v: u64) -> Self::Scalar;
    /// Uniform scalar conditioned on being neither 0 nor 1.
    fn scalar_random<R: RngCore + ?Sized>(rng: &mut R) -> Self::Scalar;
    fn scalar_add(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_mul(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar;
    fn scalar_neg(a: &Self::Scalar) -> Self::Scalar;
    fn scalar_inv(a: &Self::Scalar) -> Result<Self::Scalar, BilinearError>;

    fn g1_identity() -> Self::G1;
    fn g2_identity() -> Self::G2;
    fn gt_identity() -> Self::Gt;

    fn g1_op(a: &Self::G1, b: &Self::G1) -> Self::G1;
    fn g2_op(a: &Self::G2, b: &Self::G2) -> Self::G2;
    fn gt_op(a: &Self::Gt, b: &Self::Gt) -> Self::Gt;

    fn g1_exp(base: &Self::G1, e: &Self::Scalar) -> Self::G1;
    fn g2_exp(base: &Self::G2, e: &Self::Scalar) -> Self::G2;
    fn gt_exp(base: &Self::Gt, e: &Self::Scalar) -> Self::Gt;

    fn encode_scalar(s: &Self::Scalar) -> Vec<u8>;
    fn decode_scalar(bytes: &[u8]) -> Result<Self::Scalar, BilinearError>;
    fn encode_g1(x: &Self::G1) -> Vec<u8>;
    fn decode_g1(bytes: &[u8]) -> Result<Self::G1, BilinearError>;
    fn encode_g2(x: &Self::G2) -> Vec<u8>;
    fn decode_g2(bytes: &[u8]) -> Result<Self::G2, BilinearError>;
    fn encode_gt(x: &Self::Gt) -> Vec<u8>;
    fn decode_gt(bytes: &[u8]) -> Result<Self::Gt, BilinearError>;

    fn scalar_is_zero(s: &Self::Scalar) -> bool {
        *s == Self::scalar_from_u64(0)
    }
}

/// Pad width `δ` in bytes: the width of a canonical GT encoding.
pub fn pad_width<B: BilinearGroup>() -> usize {
    B::description().gt_width
}

/// The one-time pad derived from a target-group element.
///
/// The pad is the canonical GT encoding itself, so it is exactly
/// [`pad_width`] bytes and injective in its input.
pub fn gt_to_pad<B: BilinearGroup>(x: &B::Gt) -> Vec<u8> {
    B::encode_gt(x)
}

/// `a / b` in the scalar field.
pub fn scalar_div<B: BilinearGroup>(
    a: &B::Scalar,
    b: &B::Scalar,
) -> Result<B::Scalar, BilinearError> {
    Ok(B::scalar_mul(a, &B::scalar_inv(b)?))
}
