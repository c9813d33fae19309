//! Bilinear-group arithmetic behind a symmetric-pairing contract.
//!
//! The scheme algebra is written for a symmetric pairing e: G_0 × G_0 → G_1.
//! Modern curves only provide asymmetric pairings, so a [`SourceElement`]
//! stores the same exponent's image in *both* pairing input groups of
//! BLS12-381: x = (g1^a, g2^a). [`pair`] feeds the left operand's G1 image and
//! the right operand's G2 image to the Miller loop, which makes
//! `pair(g^a, g^b) = pair(g, g)^(a*b)` hold with both argument orders, exactly
//! as the formulas read.
//!
//! Every element constructed through this module (generator, `exp`, `mul`,
//! [`hash_to_group`]) keeps the two images consistent; `from_bytes` re-checks
//! consistency with a pairing equation so foreign encodings cannot smuggle in
//! mismatched halves.

use ark_bls12_381::{Bls12_381, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{CurveGroup, PrimeGroup};
use ark_ff::{BigInteger, Field, PrimeField, UniformRand, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Width of the fixed big-endian scalar encoding: ceil(255 / 8).
pub const SCALAR_BYTES: usize = 32;
/// Width of a serialized [`SourceElement`]: compressed G1 ‖ compressed G2.
pub const SOURCE_BYTES: usize = 48 + 96;
/// Width of a serialized [`TargetElement`].
pub const TARGET_BYTES: usize = 576;

/// Domain-separation tag for hashing attribute strings into the source group.
pub const ATTR_HASH_DST: &[u8] = b"blockabe-v1:attr-hash";

/// An element of Z_p, p the prime order of the pairing groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scalar(pub(crate) Fr);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Fr::zero())
    }

    pub fn one() -> Self {
        Scalar(Fr::from(1u64))
    }

    pub fn from_u64(v: u64) -> Self {
        Scalar(Fr::from(v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Uniformly random scalar; zero is possible (probability 2^-255).
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        Scalar(Fr::rand(rng))
    }

    /// Uniformly random nonzero scalar. Exponents that get inverted (β, q)
    /// must come from here.
    pub fn random_nonzero<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        loop {
            let s = Self::random(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Scalar(self.0 + other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Scalar(self.0 - other.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Scalar(self.0 * other.0)
    }

    pub fn neg(&self) -> Self {
        Scalar(-self.0)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.0.inverse().map(Scalar).ok_or(Error::InverseOfZero)
    }

    /// Fixed-width 32-byte big-endian encoding.
    pub fn to_bytes(&self) -> [u8; SCALAR_BYTES] {
        let v = self.0.into_bigint().to_bytes_be();
        let mut out = [0u8; SCALAR_BYTES];
        out[SCALAR_BYTES - v.len()..].copy_from_slice(&v);
        out
    }

    /// Rejects encodings that are not canonical (value ≥ p) or mis-sized.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != SCALAR_BYTES {
            return Err(Error::Decode(format!(
                "scalar must be {SCALAR_BYTES} bytes, got {}",
                bytes.len()
            )));
        }
        let s = Scalar(Fr::from_be_bytes_mod_order(bytes));
        if s.to_bytes() != bytes {
            return Err(Error::Decode("non-canonical scalar encoding".into()));
        }
        Ok(s)
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.into_bigint().cmp(&other.0.into_bigint())
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// An element of the source group G_0, stored as matching images in both
/// pairing input groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceElement {
    g1: G1Projective,
    g2: G2Projective,
}

impl SourceElement {
    /// The fixed generator g.
    pub fn generator() -> Self {
        SourceElement { g1: G1Projective::generator(), g2: G2Projective::generator() }
    }

    pub fn identity() -> Self {
        SourceElement { g1: G1Projective::zero(), g2: G2Projective::zero() }
    }

    pub fn is_identity(&self) -> bool {
        self.g1.is_zero()
    }

    /// Group exponentiation.
    pub fn exp(&self, e: &Scalar) -> Self {
        SourceElement { g1: self.g1 * e.0, g2: self.g2 * e.0 }
    }

    /// The group operation (multiplicative notation).
    pub fn mul(&self, other: &Self) -> Self {
        SourceElement { g1: self.g1 + other.g1, g2: self.g2 + other.g2 }
    }

    pub fn inverse(&self) -> Self {
        SourceElement { g1: -self.g1, g2: -self.g2 }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inverse())
    }

    /// Compressed canonical encoding: 48-byte G1 image ‖ 96-byte G2 image.
    pub fn to_bytes(&self) -> [u8; SOURCE_BYTES] {
        let mut out = [0u8; SOURCE_BYTES];
        let mut cur = &mut out[..48];
        self.g1
            .into_affine()
            .serialize_compressed(&mut cur)
            .expect("48-byte buffer fits a compressed G1 point");
        let mut cur = &mut out[48..];
        self.g2
            .into_affine()
            .serialize_compressed(&mut cur)
            .expect("96-byte buffer fits a compressed G2 point");
        out
    }

    /// Validates group membership of both halves and their consistency
    /// (equal discrete logs), so the symmetric contract survives decoding.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != SOURCE_BYTES {
            return Err(Error::Decode(format!(
                "source element must be {SOURCE_BYTES} bytes, got {}",
                bytes.len()
            )));
        }
        let g1 = G1Affine::deserialize_compressed(&bytes[..48])
            .map_err(|e| Error::Decode(format!("bad G1 half: {e}")))?;
        let g2 = G2Affine::deserialize_compressed(&bytes[48..])
            .map_err(|e| Error::Decode(format!("bad G2 half: {e}")))?;
        let el = SourceElement { g1: g1.into(), g2: g2.into() };
        // e(x1, g2) == e(g1, x2) iff both halves share the exponent.
        let lhs = Bls12_381::pairing(el.g1, G2Projective::generator());
        let rhs = Bls12_381::pairing(G1Projective::generator(), el.g2);
        if lhs != rhs {
            return Err(Error::Decode("inconsistent source element halves".into()));
        }
        Ok(el)
    }
}

/// An element of the target group G_1 (pairing outputs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetElement(PairingOutput<Bls12_381>);

impl TargetElement {
    pub fn one() -> Self {
        TargetElement(PairingOutput::zero())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_zero()
    }

    pub fn exp(&self, e: &Scalar) -> Self {
        TargetElement(self.0 * e.0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        TargetElement(self.0 + other.0)
    }

    pub fn inverse(&self) -> Self {
        TargetElement(-self.0)
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inverse())
    }

    pub fn to_bytes(&self) -> [u8; TARGET_BYTES] {
        let mut out = [0u8; TARGET_BYTES];
        let mut cur = &mut out[..];
        self.0
            .serialize_compressed(&mut cur)
            .expect("576-byte buffer fits a target element");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != TARGET_BYTES {
            return Err(Error::Decode(format!(
                "target element must be {TARGET_BYTES} bytes, got {}",
                bytes.len()
            )));
        }
        PairingOutput::deserialize_compressed(bytes)
            .map(TargetElement)
            .map_err(|e| Error::Decode(format!("bad target element: {e}")))
    }
}

/// The bilinear map under the symmetric contract.
pub fn pair(a: &SourceElement, b: &SourceElement) -> TargetElement {
    TargetElement(Bls12_381::pairing(a.g1, b.g2))
}

/// Hash an arbitrary label to a scalar under a domain-separation tag.
///
/// expand-then-reduce: two SHA-256 blocks give 512 uniform bits, reduced
/// mod p (bias < 2^-257).
pub fn hash_to_scalar(dst: &[u8], label: &[u8]) -> Scalar {
    let mut wide = [0u8; 64];
    for (i, chunk) in wide.chunks_mut(32).enumerate() {
        let mut h = Sha256::new();
        h.update((dst.len() as u64).to_be_bytes());
        h.update(dst);
        h.update([i as u8]);
        h.update(label);
        chunk.copy_from_slice(&h.finalize());
    }
    Scalar(Fr::from_be_bytes_mod_order(&wide))
}

/// Deterministically map a label (attribute string) to a source-group element.
///
/// The dual-image representation needs the same exponent in both input
/// groups, which a point-level hash-to-curve cannot provide; instead the
/// label is hashed to a scalar (fixed tag [`ATTR_HASH_DST`]) and both
/// generator images are exponentiated by it.
pub fn hash_to_group(label: &[u8]) -> SourceElement {
    SourceElement::generator().exp(&hash_to_scalar(ATTR_HASH_DST, label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    #[test]
    fn deterministic_seeding() {
        let a = Scalar::random(&mut rng(42));
        let b = Scalar::random(&mut rng(42));
        assert_eq!(a, b);
        let c = Scalar::random(&mut rng(43));
        assert_ne!(a, c);
    }

    #[test]
    fn nonzero_draws_are_nonzero() {
        for seed in 0..32 {
            assert!(!Scalar::random_nonzero(&mut rng(seed)).is_zero());
        }
    }

    #[test]
    fn scalar_field_axioms() {
        let mut r = rng(1);
        assert_eq!(Scalar::one().inverse().unwrap(), Scalar::one());
        for _ in 0..50 {
            let a = Scalar::random_nonzero(&mut r);
            assert_eq!(a.mul(&a.inverse().unwrap()), Scalar::one());
            assert_eq!(a.add(&a.neg()), Scalar::zero());
        }
        assert!(matches!(Scalar::zero().inverse(), Err(Error::InverseOfZero)));
    }

    #[test]
    fn exp_respects_scalar_arithmetic() {
        let g = SourceElement::generator();
        let mut r = rng(2);
        for _ in 0..20 {
            let a = Scalar::random(&mut r);
            let b = Scalar::random(&mut r);
            assert_eq!(g.exp(&a).exp(&b), g.exp(&a.mul(&b)));
            assert_eq!(g.exp(&a).mul(&g.exp(&b)), g.exp(&a.add(&b)));
        }
        assert_eq!(g.exp(&Scalar::zero()), SourceElement::identity());
        // exponent p reduces to 0 in Z_p
        let p_bytes = [
            0x73u8, 0xed, 0xa7, 0x53, 0x29, 0x9d, 0x7d, 0x48, 0x33, 0x39, 0xd8, 0x08, 0x09, 0xa1,
            0xd8, 0x05, 0x53, 0xbd, 0xa4, 0x02, 0xff, 0xfe, 0x5b, 0xfe, 0xff, 0xff, 0xff, 0xff,
            0x00, 0x00, 0x00, 0x01,
        ];
        let p = Scalar(Fr::from_be_bytes_mod_order(&p_bytes));
        assert!(p.is_zero());
        assert_eq!(g.exp(&p), SourceElement::identity());
    }

    #[test]
    fn bilinearity() {
        let g = SourceElement::generator();
        let e_gg = pair(&g, &g);
        assert!(!e_gg.is_one());
        assert_eq!(pair(&g, &SourceElement::identity()), TargetElement::one());
        let mut r = rng(3);
        for _ in 0..100 {
            let a = Scalar::random(&mut r);
            let b = Scalar::random(&mut r);
            assert_eq!(pair(&g.exp(&a), &g.exp(&b)), e_gg.exp(&a.mul(&b)));
        }
    }

    #[test]
    fn pairing_symmetric_contract() {
        let mut r = rng(4);
        let a = SourceElement::generator().exp(&Scalar::random(&mut r));
        let b = hash_to_group(b"some attribute");
        assert_eq!(pair(&a, &b), pair(&b, &a));
    }

    #[test]
    fn hash_to_group_deterministic_and_distinct() {
        assert_eq!(hash_to_group(b"temp_sensor"), hash_to_group(b"temp_sensor"));
        assert_ne!(hash_to_group(b"a"), hash_to_group(b"b"));
        assert!(!hash_to_group(b"").is_identity());
    }

    #[test]
    fn hash_to_group_injective_over_corpus() {
        let mut seen = std::collections::HashSet::new();
        for i in 0..10_000u32 {
            let el = hash_to_group(format!("attr-{i}").as_bytes());
            assert!(seen.insert(el.to_bytes().to_vec()), "collision at label {i}");
        }
    }

    #[test]
    fn serialization_round_trip_and_canonical() {
        let mut r = rng(5);
        for _ in 0..10 {
            let s = Scalar::random(&mut r);
            assert_eq!(Scalar::from_bytes(&s.to_bytes()).unwrap(), s);

            let x = SourceElement::generator().exp(&Scalar::random(&mut r));
            let bytes = x.to_bytes();
            let back = SourceElement::from_bytes(&bytes).unwrap();
            assert_eq!(back, x);
            assert_eq!(back.to_bytes(), bytes);

            let t = pair(&x, &SourceElement::generator());
            let tb = t.to_bytes();
            let tback = TargetElement::from_bytes(&tb).unwrap();
            assert_eq!(tback, t);
            assert_eq!(tback.to_bytes(), tb);
        }
    }

    #[test]
    fn truncated_encoding_rejected() {
        let g = SourceElement::generator();
        assert!(SourceElement::from_bytes(&g.to_bytes()[..100]).is_err());
        assert!(Scalar::from_bytes(&[0u8; 16]).is_err());
        assert!(TargetElement::from_bytes(&[0u8; 100]).is_err());
    }

    #[test]
    fn non_canonical_scalar_rejected() {
        // p itself is a non-canonical encoding of 0
        let p_bytes = [
            0x73u8, 0xed, 0xa7, 0x53, 0x29, 0x9d, 0x7d, 0x48, 0x33, 0x39, 0xd8, 0x08, 0x09, 0xa1,
            0xd8, 0x05, 0x53, 0xbd, 0xa4, 0x02, 0xff, 0xfe, 0x5b, 0xfe, 0xff, 0xff, 0xff, 0xff,
            0x00, 0x00, 0x00, 0x01,
        ];
        assert!(Scalar::from_bytes(&p_bytes).is_err());
    }

    #[test]
    fn mismatched_halves_rejected() {
        let g = SourceElement::generator();
        let two = g.exp(&Scalar::from_u64(2));
        let mut bytes = g.to_bytes();
        // splice the G1 half of g^2 onto the G2 half of g
        bytes[..48].copy_from_slice(&two.to_bytes()[..48]);
        assert!(SourceElement::from_bytes(&bytes).is_err());
    }

    #[test]
    fn byte_flip_fuzz_never_panics() {
        let mut r = rng(6);
        let el = SourceElement::generator().exp(&Scalar::random(&mut r));
        let baseline = el.to_bytes();
        use rand::Rng;
        for _ in 0..1000 {
            let mut mutated = baseline;
            let pos = r.gen_range(0..SOURCE_BYTES);
            let bit = 1u8 << r.gen_range(0..8);
            mutated[pos] ^= bit;
            // decode error or a different valid element; never a crash
            if let Ok(other) = SourceElement::from_bytes(&mutated) {
                assert_ne!(other, el);
            }
        }
    }
}
