//! `Z_p` bilinear model: `G1 = G2 = (Z_p, +)`, `GT = (Z_p, +)`,
//! `e(a, b) = a*b mod p`.
//!
//! Discrete logarithms are trivial here, which is exactly what makes it useful:
//! every protocol value can be checked against its closed-form exponent by
//! exhaustive search. It provides no security whatsoever.

use rand::{Rng, RngCore};

use super::{BackendId, BilinearError, BilinearGroup, ElementKind, GroupDescription};

/// Toy backend over the prime `P`. `P` must be prime and at least 5.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Toy<const P: u32>;

/// The toy backend used by the CLI and golden files.
pub type Toy101 = Toy<101>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToyScalar<const P: u32>(u32);

/// Element of the shared source group (`G1 = G2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToyElement<const P: u32>(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ToyTarget<const P: u32>(u32);

macro_rules! residue_accessors {
    ($($t:ident),*) => {$(
        impl<const P: u32> $t<P> {
            /// Canonical representative in `[0, P)`.
            pub fn value(self) -> u32 {
                self.0
            }

            pub fn new(v: u64) -> Self {
                $t((v % P as u64) as u32)
            }
        }
    )*};
}
residue_accessors!(ToyScalar, ToyElement, ToyTarget);

const fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

const fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc
}

/// Smallest primitive root modulo the prime `p`.
const fn primitive_root(p: u32) -> u32 {
    let n = (p - 1) as u64;
    let mut g = 2u32;
    loop {
        // g generates Z_p^* iff g^((p-1)/q) != 1 for every prime q | p-1.
        let mut ok = true;
        let mut q = 2u64;
        let mut rest = n;
        while q * q <= rest {
            if rest.is_multiple_of(q) {
                if pow_mod(g as u64, n / q, p as u64) == 1 {
                    ok = false;
                }
                while rest.is_multiple_of(q) {
                    rest /= q;
                }
            }
            q += 1;
        }
        if rest > 1 && pow_mod(g as u64, n / rest, p as u64) == 1 {
            ok = false;
        }
        if ok {
            return g;
        }
        g += 1;
    }
}

const fn byte_width(max: u32) -> usize {
    let bits = 32 - max.leading_zeros() as usize;
    if bits == 0 {
        1
    } else {
        bits.div_ceil(8)
    }
}

impl<const P: u32> Toy<P> {
    const VALID: () = assert!(is_prime(P) && P >= 5, "toy backend needs a prime P >= 5");
    const WIDTH: usize = byte_width(P - 1);

    /// The fixed generator of `G1 = G2`: the smallest primitive root of `P`.
    pub const GENERATOR: u32 = primitive_root(P);

    fn mul(a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % P as u64) as u32
    }

    fn add(a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % P as u64) as u32
    }

    fn encode(v: u32) -> Vec<u8> {
        let () = Self::VALID;
        v.to_be_bytes()[4 - Self::WIDTH..].to_vec()
    }

    fn decode(kind: ElementKind, bytes: &[u8]) -> Result<u32, BilinearError> {
        if bytes.len() != Self::WIDTH {
            return Err(BilinearError::decode(
                kind,
                format!("expected {} bytes, got {}", Self::WIDTH, bytes.len()),
            ));
        }
        let v = bytes.iter().fold(0u32, |acc, b| (acc << 8) | *b as u32);
        if v >= P {
            return Err(BilinearError::decode(kind, format!("{v} is not reduced mod {P}")));
        }
        Ok(v)
    }
}

impl<const P: u32> BilinearGroup for Toy<P> {
    type Scalar = ToyScalar<P>;
    type G1 = ToyElement<P>;
    type G2 = ToyElement<P>;
    type Gt = ToyTarget<P>;

    fn description() -> GroupDescription {
        let () = Self::VALID;
        let order = P.to_be_bytes();
        let skip = order.iter().take_while(|b| **b == 0).count();
        GroupDescription {
            backend: BackendId::ToyInteger,
            order: order[skip..].to_vec(),
            scalar_width: Self::WIDTH,
            g1_width: Self::WIDTH,
            g2_width: Self::WIDTH,
            gt_width: Self::WIDTH,
        }
    }

    fn g1_base() -> Self::G1 {
        ToyElement(Self::GENERATOR)
    }

    fn g2_base() -> Self::G2 {
        ToyElement(Self::GENERATOR)
    }

    fn pair(a: &Self::G1, b: &Self::G2) -> Self::Gt {
        ToyTarget(Self::mul(a.0, b.0))
    }

    fn scalar_from_u64(v: u64) -> Self::Scalar {
        ToyScalar::new(v)
    }

    fn scalar_random<R: RngCore + ?Sized>(rng: &mut R) -> Self::Scalar {
        let () = Self::VALID;
        ToyScalar(rng.gen_range(2..P))
    }

    fn scalar_add(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar {
        ToyScalar(Self::add(a.0, b.0))
    }

    fn scalar_mul(a: &Self::Scalar, b: &Self::Scalar) -> Self::Scalar {
        ToyScalar(Self::mul(a.0, b.0))
    }

    fn scalar_neg(a: &Self::Scalar) -> Self::Scalar {
        ToyScalar((P - a.0) % P)
    }

    fn scalar_inv(a: &Self::Scalar) -> Result<Self::Scalar, BilinearError> {
        if a.0 == 0 {
            return Err(BilinearError::ZeroInverse);
        }
        // Fermat: a^(p-2) = a^-1.
        Ok(ToyScalar(pow_mod(a.0 as u64, (P - 2) as u64, P as u64) as u32))
    }

    fn g1_identity() -> Self::G1 {
        ToyElement(0)
    }

    fn g2_identity() -> Self::G2 {
        ToyElement(0)
    }

    fn gt_identity() -> Self::Gt {
        ToyTarget(0)
    }

    fn g1_op(a: &Self::G1, b: &Self::G1) -> Self::G1 {
        ToyElement(Self::add(a.0, b.0))
    }

    fn g2_op(a: &Self::G2, b: &Self::G2) -> Self::G2 {
        ToyElement(Self::add(a.0, b.0))
    }

    fn gt_op(a: &Self::Gt, b: &Self::Gt) -> Self::Gt {
        ToyTarget(Self::add(a.0, b.0))
    }

    fn g1_exp(base: &Self::G1, e: &Self::Scalar) -> Self::G1 {
        ToyElement(Self::mul(base.0, e.0))
    }

    fn g2_exp(base: &Self::G2, e: &Self::Scalar) -> Self::G2 {
        ToyElement(Self::mul(base.0, e.0))
    }

    fn gt_exp(base: &Self::Gt, e: &Self::Scalar) -> Self::Gt {
        ToyTarget(Self::mul(base.0, e.0))
    }

    fn encode_scalar(s: &Self::Scalar) -> Vec<u8> {
        Self::encode(s.0)
    }

    fn decode_scalar(bytes: &[u8]) -> Result<Self::Scalar, BilinearError> {
        Self::decode(ElementKind::Scalar, bytes).map(ToyScalar)
    }

    fn encode_g1(x: &Self::G1) -> Vec<u8> {
        Self::encode(x.0)
    }

    fn decode_g1(bytes: &[u8]) -> Result<Self::G1, BilinearError> {
        Self::decode(ElementKind::G1, bytes).map(ToyElement)
    }

    fn encode_g2(x: &Self::G2) -> Vec<u8> {
        Self::encode(x.0)
    }

    fn decode_g2(bytes: &[u8]) -> Result<Self::G2, BilinearError> {
        Self::decode(ElementKind::G2, bytes).map(ToyElement)
    }

    fn encode_gt(x: &Self::Gt) -> Vec<u8> {
        Self::encode(x.0)
    }

    fn decode_gt(bytes: &[u8]) -> Result<Self::Gt, BilinearError> {
        Self::decode(ElementKind::Gt, bytes).map(ToyTarget)
    }
}
