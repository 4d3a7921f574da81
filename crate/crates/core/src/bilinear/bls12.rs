//! BLS12-381 backend.
//!
//! Source groups use the standard compressed point encodings (48 bytes for G1,
//! 96 for G2). GT elements are written as their full `Fp12` coordinates, 576
//! bytes, which is also the pad width. Scalars are 32 bytes big-endian.

use ark_bls12_381::{Bls12_381, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{CurveGroup, PrimeGroup};
use ark_ff::{BigInteger, Field, One, PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use rand::RngCore;

use super::{BackendId, BilinearError, BilinearGroup, ElementKind, GroupDescription};

const SCALAR_WIDTH: usize = 32;
const G1_WIDTH: usize = 48;
const G2_WIDTH: usize = 96;
const GT_WIDTH: usize = 576;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Bls12;

fn serialize<T: CanonicalSerialize>(x: &T, width: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(width);
    x.serialize_compressed(&mut out)
        .expect("serializing into a Vec cannot fail");
    debug_assert_eq!(out.len(), width);
    out
}

fn deserialize<T: CanonicalDeserialize>(
    kind: ElementKind,
    bytes: &[u8],
    width: usize,
) -> Result<T, BilinearError> {
    if bytes.len() != width {
        return Err(BilinearError::decode(
            kind,
            format!("expected {width} bytes, got {}", bytes.len()),
        ));
    }
    T::deserialize_compressed(bytes).map_err(|e| BilinearError::decode(kind, e.to_string()))
}

impl BilinearGroup for Bls12 {
    type Scalar = Fr;
    type G1 = G1Projective;
    type G2 = G2Projective;
    type Gt = PairingOutput<Bls12_381>;

    fn description() -> GroupDescription {
        GroupDescription {
            backend: BackendId::Bls12_381,
            order: Fr::MODULUS.to_bytes_be(),
            scalar_width: SCALAR_WIDTH,
            g1_width: G1_WIDTH,
            g2_width: G2_WIDTH,
            gt_width: GT_WIDTH,
        }
    }

    fn g1_base() -> Self::G1 {
        G1Projective::generator()
    }

    fn g2_base() -> Self::G2 {
        G2Projective::generator()
    }

    fn pair(a: &Self::G1, b: &Self::G2) -> Self::Gt {
        Bls12_381::pairing(a.into_affine(), b.into_affine())
    }

    fn scalar_from_u64(v: u64) -> Self::Scalar {
        Fr::from(v)
    }

    fn scalar_random<R: RngCore + ?Sized>(rng: &mut R) -> Self::Scalar {
        loop {
            let mut wide = [0u8; 64];
            rng.fill_bytes(&mut wide);
            let s = Fr::from_le_bytes_mod_order(&wide);
            if !s.is_zero() && !s.is_one() {
                return s;
            }
        }
    }

    fn scalar_add(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar {
        *a + b
    }

    fn scalar_mul(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar {
        *a * b
    }

    fn scalar_neg(a: &Self::Scalar) -> Self::Scalar {
        -*a
    }

    fn scalar_inv(a: &Self::Scalar) -> Result<Self::Scalar, BilinearError> {
        a.inverse().ok_or(BilinearError::ZeroInverse)
    }

    fn g1_identity() -> Self::G1 {
        G1Projective::zero()
    }

    fn g2_identity() -> Self::G2 {
        G2Projective::zero()
    }

    fn gt_identity() -> Self::Gt {
        PairingOutput::zero()
    }

    fn g1_op(a: &Self::G1, b: &Self::G1) -> Self::G1 {
        *a + b
    }

    fn g2_op(a: &Self::G2, b: &Self::G2) -> Self::G2 {
        *a + b
    }

    fn gt_op(a: &Self::Gt, b: &Self::Gt) -> Self::Gt {
        *a + b
    }

    fn g1_exp(base: &Self::G1, e: &Self::Scalar) -> Self::G1 {
        *base * e
    }

    fn g2_exp(base: &Self::G2, e: &Self::Scalar) -> Self::G2 {
        *base * e
    }

    fn gt_exp(base: &Self::Gt, e: &Self::Scalar) -> Self::Gt {
        *base * e
    }

    fn encode_scalar(s: &Self::Scalar) -> Vec<u8> {
        s.into_bigint().to_bytes_be()
    }

    fn decode_scalar(bytes: &[u8]) -> Result<Self::Scalar, BilinearError> {
        if bytes.len() != SCALAR_WIDTH {
            return Err(BilinearError::decode(
                ElementKind::Scalar,
                format!("expected {SCALAR_WIDTH} bytes, got {}", bytes.len()),
            ));
        }
        let mut le = bytes.to_vec();
        le.reverse();
        deserialize::<Fr>(ElementKind::Scalar, &le, SCALAR_WIDTH)
    }

    fn encode_g1(x: &Self::G1) -> Vec<u8> {
        serialize(&x.into_affine(), G1_WIDTH)
    }

    fn decode_g1(bytes: &[u8]) -> Result<Self::G1, BilinearError> {
        deserialize::<G1Affine>(ElementKind::G1, bytes, G1_WIDTH).map(Into::into)
    }

    fn encode_g2(x: &Self::G2) -> Vec<u8> {
        serialize(&x.into_affine(), G2_WIDTH)
    }

    fn decode_g2(bytes: &[u8]) -> Result<Self::G2, BilinearError> {
        deserialize::<G2Affine>(ElementKind::G2, bytes, G2_WIDTH).map(Into::into)
    }

    fn encode_gt(x: &Self::Gt) -> Vec<u8> {
        serialize(x, GT_WIDTH)
    }

    fn decode_gt(bytes: &[u8]) -> Result<Self::Gt, BilinearError> {
        deserialize(ElementKind::Gt, bytes, GT_WIDTH)
    }
}
