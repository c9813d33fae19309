//! Secret-sharing machinery: top-down polynomial share assignment over the
//! access tree, Lagrange recombination, (k, t) Shamir sharing of the final id
//! share, the (n+1, n+1) XOR sharing of the serialized tree, and the masked
//! attribute point table.
//!
//! Everything polynomial is generic over [`ShareField`] so the brute-force
//! oracles can run over the tiny field p = 2^31 − 1 ([`tiny::TinyScalar`])
//! while production uses the pairing group order.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt::Debug;

use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pairing::{Scalar, SCALAR_BYTES};
use crate::policy::{AccessTree, NodeId, SerializedTree};

/// Bytes of the serialized tree carried by each 32-byte scalar limb.
pub const LIMB_BYTES: usize = 31;

const TABLE_KEY_DST: &[u8] = b"blockabe-v1:A-key";
const TABLE_MASK_DST: &[u8] = b"blockabe-v1:A-mask";

/// Field operations needed by the sharing algorithms.
pub trait ShareField: Copy + Clone + Eq + Ord + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(v: u64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inverse(&self) -> Result<Self>;
    fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self;
    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

impl ShareField for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn from_u64(v: u64) -> Self {
        Scalar::from_u64(v)
    }
    fn add(&self, other: &Self) -> Self {
        Scalar::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Scalar::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Scalar::mul(self, other)
    }
    fn neg(&self) -> Self {
        Scalar::neg(self)
    }
    fn inverse(&self) -> Result<Self> {
        Scalar::inverse(self)
    }
    fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        Scalar::random(rng)
    }
}

pub mod tiny {
    //! The tiny test field Z_p with p = 2^31 − 1, small enough for
    //! brute-force oracles.

    use super::ShareField;
    use crate::error::{Error, Result};
    use rand::{CryptoRng, RngCore};

    pub const P: u64 = (1 << 31) - 1;

    #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
    pub struct TinyScalar(u64);

    impl TinyScalar {
        pub fn new(v: u64) -> Self {
            TinyScalar(v % P)
        }

        pub fn value(&self) -> u64 {
            self.0
        }

        fn pow(&self, mut e: u64) -> Self {
            let mut base = *self;
            let mut acc = TinyScalar(1);
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc.mul(&base);
                }
                base = base.mul(&base);
                e >>= 1;
            }
            acc
        }
    }

    impl ShareField for TinyScalar {
        fn zero() -> Self {
            TinyScalar(0)
        }
        fn one() -> Self {
            TinyScalar(1)
        }
        fn from_u64(v: u64) -> Self {
            TinyScalar::new(v)
        }
        fn add(&self, other: &Self) -> Self {
            TinyScalar((self.0 + other.0) % P)
        }
        fn sub(&self, other: &Self) -> Self {
            TinyScalar((self.0 + P - other.0) % P)
        }
        fn mul(&self, other: &Self) -> Self {
            TinyScalar((self.0 * other.0) % P)
        }
        fn neg(&self) -> Self {
            TinyScalar((P - self.0) % P)
        }
        fn inverse(&self) -> Result<Self> {
            if self.0 == 0 {
                return Err(Error::InverseOfZero);
            }
            Ok(self.pow(P - 2))
        }
        fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
            loop {
                let v = rng.next_u64() >> 33;
                if v < P {
                    return TinyScalar(v);
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomials and Lagrange coefficients
// ---------------------------------------------------------------------------

/// Dense polynomial; coeffs[0] is the constant term and the shared secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial<F> {
    pub coeffs: Vec<F>,
}

impl<F: ShareField> Polynomial<F> {
    /// Fresh polynomial of the given degree with a fixed constant term.
    pub fn random_with_constant<R: RngCore + CryptoRng>(
        constant: F,
        degree: usize,
        rng: &mut R,
    ) -> Self {
        let mut coeffs = vec![constant];
        coeffs.extend((0..degree).map(|_| F::random(rng)));
        Polynomial { coeffs }
    }

    pub fn eval(&self, x: F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&x).add(c);
        }
        acc
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

/// The Lagrange coefficient Δ_{i,S}(x) = Π_{j∈S, j≠i} (x−j)/(i−j).
///
/// Requires i ∈ S and pairwise-distinct S.
pub fn lagrange_coeff<F: ShareField>(i: F, s: &[F], x: F) -> Result<F> {
    let mut seen = s.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::RepeatedPoint);
    }
    if !s.contains(&i) {
        return Err(Error::InvalidInput("lagrange point i not in S".into()));
    }
    let mut acc = F::one();
    for j in s {
        if *j == i {
            continue;
        }
        let num = x.sub(j);
        let den = i.sub(j).inverse()?;
        acc = acc.mul(&num).mul(&den);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Share assignment over the access tree
// ---------------------------------------------------------------------------

/// Per-node shares q_x(0) and per-gate polynomials, assigned top-down so that
/// q_root(0) = s and q_child(0) = q_parent(index(child)).
#[derive(Debug, Clone)]
pub struct ShareAssignment<F> {
    shares: BTreeMap<NodeId, F>,
    polys: BTreeMap<NodeId, Polynomial<F>>,
}

impl<F: ShareField> ShareAssignment<F> {
    pub fn share(&self, node: NodeId) -> Option<F> {
        self.shares.get(&node).copied()
    }

    pub fn polynomial(&self, gate: NodeId) -> Option<&Polynomial<F>> {
        self.polys.get(&gate)
    }
}

/// Walk the tree from the root, drawing a fresh degree-(k_x − 1) polynomial
/// per gate and handing each child the evaluation at its index.
pub fn assign_shares<F: ShareField, R: RngCore + CryptoRng>(
    tree: &AccessTree,
    s: F,
    rng: &mut R,
) -> ShareAssignment<F> {
    let mut shares = BTreeMap::new();
    let mut polys = BTreeMap::new();
    shares.insert(tree.root(), s);
    let mut stack = vec![tree.root()];
    while let Some(id) = stack.pop() {
        let node = tree.node(id);
        if let Some(k) = node.threshold() {
            let constant = shares[&id];
            let poly = Polynomial::random_with_constant(constant, (k - 1) as usize, rng);
            for &child in &node.children {
                let at = F::from_u64(tree.node(child).index as u64);
                shares.insert(child, poly.eval(at));
                stack.push(child);
            }
            polys.insert(id, poly);
        }
    }
    ShareAssignment { shares, polys }
}

// ---------------------------------------------------------------------------
// Shamir sharing
// ---------------------------------------------------------------------------

/// Split a field secret into t points on a fresh degree-(k−1) polynomial,
/// x-coordinates 1..=t.
pub fn shamir_split<F: ShareField, R: RngCore + CryptoRng>(
    secret: F,
    k: u16,
    t: u16,
    rng: &mut R,
) -> Result<Vec<(F, F)>> {
    if k == 0 || k > t {
        return Err(Error::InvalidThreshold { k, t });
    }
    let poly = Polynomial::random_with_constant(secret, (k - 1) as usize, rng);
    Ok((1..=t as u64).map(|x| (F::from_u64(x), poly.eval(F::from_u64(x)))).collect())
}

/// Interpolate at 0 from at least k points with distinct x, using exactly the
/// k lowest x values (deterministic when more are supplied).
pub fn shamir_recover<F: ShareField>(points: &[(F, F)], k: u16) -> Result<F> {
    let mut dedup: BTreeMap<F, F> = BTreeMap::new();
    for (x, y) in points {
        dedup.entry(*x).or_insert(*y);
    }
    if dedup.len() < k as usize {
        return Err(Error::InsufficientShares { have: dedup.len(), need: k as usize });
    }
    let chosen: Vec<(F, F)> = dedup.into_iter().take(k as usize).collect();
    let xs: Vec<F> = chosen.iter().map(|(x, _)| *x).collect();
    let mut acc = F::zero();
    for (x, y) in &chosen {
        let coeff = lagrange_coeff(*x, &xs, F::zero())?;
        acc = acc.add(&coeff.mul(y));
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Byte-string Shamir sharing (31-byte limbs)
// ---------------------------------------------------------------------------

/// One share of a byte-string secret: a shared x-coordinate and one y value
/// per 31-byte limb of the secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShamirPoint {
    pub x: Scalar,
    pub y: Vec<Scalar>,
}

pub fn limb_count(len: usize) -> usize {
    len.div_ceil(LIMB_BYTES).max(1)
}

fn limb_to_scalar(chunk: &[u8]) -> Scalar {
    let mut buf = [0u8; SCALAR_BYTES];
    buf[1..1 + chunk.len()].copy_from_slice(chunk);
    Scalar::from_bytes(&buf).expect("31-byte limbs are canonical scalars")
}

/// Share an arbitrary-length secret: an independent (k, t) sharing per
/// 31-byte limb, all limbs riding the same x-coordinates 1..=t.
pub fn shamir_split_bytes<R: RngCore + CryptoRng>(
    secret: &[u8],
    k: u16,
    t: u16,
    rng: &mut R,
) -> Result<Vec<ShamirPoint>> {
    if k == 0 || k > t {
        return Err(Error::InvalidThreshold { k, t });
    }
    let mut points: Vec<ShamirPoint> = (1..=t as u64)
        .map(|x| ShamirPoint { x: Scalar::from_u64(x), y: Vec::new() })
        .collect();
    let limbs = limb_count(secret.len());
    for l in 0..limbs {
        let chunk = &secret[l * LIMB_BYTES..secret.len().min((l + 1) * LIMB_BYTES)];
        let poly = Polynomial::random_with_constant(limb_to_scalar(chunk), (k - 1) as usize, rng);
        for p in points.iter_mut() {
            p.y.push(poly.eval(p.x));
        }
    }
    Ok(points)
}

/// Recover a byte-string secret of known length from at least k points.
pub fn shamir_recover_bytes(points: &[ShamirPoint], k: u16, len: usize) -> Result<Vec<u8>> {
    let limbs = limb_count(len);
    let mut dedup: BTreeMap<Scalar, &ShamirPoint> = BTreeMap::new();
    for p in points {
        dedup.entry(p.x).or_insert(p);
    }
    if dedup.len() < k as usize {
        return Err(Error::InsufficientShares { have: dedup.len(), need: k as usize });
    }
    let chosen: Vec<&ShamirPoint> = dedup.into_values().take(k as usize).collect();
    if chosen.iter().any(|p| p.y.len() != limbs) {
        return Err(Error::Decode("share limb count does not match secret length".into()));
    }
    let xs: Vec<Scalar> = chosen.iter().map(|p| p.x).collect();
    let coeffs: Vec<Scalar> = xs
        .iter()
        .map(|x| lagrange_coeff(*x, &xs, Scalar::zero()))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(limbs * LIMB_BYTES);
    for l in 0..limbs {
        let mut acc = Scalar::zero();
        for (p, c) in chosen.iter().zip(&coeffs) {
            acc = acc.add(&c.mul(&p.y[l]));
        }
        let bytes = acc.to_bytes();
        if bytes[0] != 0 {
            return Err(Error::Decode("recovered limb out of range".into()));
        }
        out.extend_from_slice(&bytes[1..]);
    }
    out.truncate(len);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Masked attribute point table
// ---------------------------------------------------------------------------

/// The array A: per-attribute XOR-masked Shamir points keyed by a hash of the
/// attribute, enabling the policy-hiding attribute pre-filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedPointTable {
    pub k: u16,
    pub t: u16,
    entries: BTreeMap<[u8; 32], Vec<u8>>,
}

fn table_key(attribute: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update((TABLE_KEY_DST.len() as u64).to_be_bytes());
    h.update(TABLE_KEY_DST);
    h.update(attribute.as_bytes());
    h.finalize().into()
}

/// Counter-mode expansion of the masking hash to an arbitrary width; a
/// distinct tag from the table key so entries are not linkable to their keys.
fn table_mask(attribute: &str, width: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(width + 32);
    let mut counter = 0u32;
    while out.len() < width {
        let mut h = Sha256::new();
        h.update((TABLE_MASK_DST.len() as u64).to_be_bytes());
        h.update(TABLE_MASK_DST);
        h.update(counter.to_be_bytes());
        h.update(attribute.as_bytes());
        out.extend_from_slice(&h.finalize());
        counter += 1;
    }
    out.truncate(width);
    out
}

fn encode_point(point: &ShamirPoint) -> Vec<u8> {
    let mut out = Vec::with_capacity(SCALAR_BYTES * (1 + point.y.len()));
    out.extend_from_slice(&point.x.to_bytes());
    for y in &point.y {
        out.extend_from_slice(&y.to_bytes());
    }
    out
}

fn decode_point(bytes: &[u8]) -> Option<ShamirPoint> {
    if bytes.len() < 2 * SCALAR_BYTES || !bytes.len().is_multiple_of(SCALAR_BYTES) {
        return None;
    }
    let x = Scalar::from_bytes(&bytes[..SCALAR_BYTES]).ok()?;
    if x.is_zero() {
        return None;
    }
    let y = bytes[SCALAR_BYTES..]
        .chunks(SCALAR_BYTES)
        .map(Scalar::from_bytes)
        .collect::<Result<Vec<_>>>()
        .ok()?;
    Some(ShamirPoint { x, y })
}

/// Build the table: every attribute of branch set j masks branch point j.
pub fn build_point_table(
    sets: &[BTreeSet<String>],
    points: &[ShamirPoint],
    k: u16,
) -> Result<MaskedPointTable> {
    if sets.len() != points.len() {
        return Err(Error::InvalidInput(format!(
            "{} branch sets but {} share points",
            sets.len(),
            points.len()
        )));
    }
    let t = sets.len() as u16;
    let mut entries = BTreeMap::new();
    let mut owners: BTreeMap<[u8; 32], String> = BTreeMap::new();
    for (set, point) in sets.iter().zip(points) {
        let encoded = encode_point(point);
        for attribute in set {
            let key = table_key(attribute);
            if let Some(prev) = owners.get(&key) {
                return Err(Error::TableKeyCollision(prev.clone(), attribute.clone()));
            }
            owners.insert(key, attribute.clone());
            let mask = table_mask(attribute, encoded.len());
            let masked: Vec<u8> = encoded.iter().zip(&mask).map(|(a, b)| a ^ b).collect();
            entries.insert(key, masked);
        }
    }
    Ok(MaskedPointTable { k, t, entries })
}

impl MaskedPointTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Unmask and decode the points reachable with `attrs`, deduplicated by
    /// x-coordinate. Undecodable or zero-x points are discarded as misses.
    pub fn lookup_points(&self, attrs: &BTreeSet<String>) -> Vec<ShamirPoint> {
        let mut by_x: BTreeMap<Scalar, ShamirPoint> = BTreeMap::new();
        for attribute in attrs {
            let key = table_key(attribute);
            let Some(masked) = self.entries.get(&key) else { continue };
            let mask = table_mask(attribute, masked.len());
            let plain: Vec<u8> = masked.iter().zip(&mask).map(|(a, b)| a ^ b).collect();
            if let Some(point) = decode_point(&plain) {
                by_x.entry(point.x).or_insert(point);
            }
        }
        by_x.into_values().collect()
    }

    /// Wire format: k ‖ t (2 bytes each), entry count (4 bytes), then
    /// sorted-by-key records of 32-byte key ‖ 2-byte length ‖ masked value.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.k.to_be_bytes());
        out.extend_from_slice(&self.t.to_be_bytes());
        out.extend_from_slice(&(self.entries.len() as u32).to_be_bytes());
        for (key, masked) in &self.entries {
            out.extend_from_slice(key);
            out.extend_from_slice(&(masked.len() as u16).to_be_bytes());
            out.extend_from_slice(masked);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::Decode("point table too short".into()));
        }
        let k = u16::from_be_bytes(bytes[0..2].try_into().unwrap());
        let t = u16::from_be_bytes(bytes[2..4].try_into().unwrap());
        let count = u32::from_be_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let mut entries = BTreeMap::new();
        let mut cursor = 8usize;
        let mut prev_key: Option<[u8; 32]> = None;
        for _ in 0..count {
            if cursor + 34 > bytes.len() {
                return Err(Error::Decode("truncated point-table record".into()));
            }
            let key: [u8; 32] = bytes[cursor..cursor + 32].try_into().unwrap();
            let len =
                u16::from_be_bytes(bytes[cursor + 32..cursor + 34].try_into().unwrap()) as usize;
            cursor += 34;
            if cursor + len > bytes.len() {
                return Err(Error::Decode("truncated point-table value".into()));
            }
            if let Some(prev) = prev_key {
                if key <= prev {
                    return Err(Error::Decode("point-table records not sorted".into()));
                }
            }
            prev_key = Some(key);
            entries.insert(key, bytes[cursor..cursor + len].to_vec());
            cursor += len;
        }
        if cursor != bytes.len() {
            return Err(Error::Decode("trailing bytes after point table".into()));
        }
        Ok(MaskedPointTable { k, t, entries })
    }
}

// ---------------------------------------------------------------------------
// (n+1, n+1) XOR sharing of the serialized tree
// ---------------------------------------------------------------------------

/// The n random block ids plus the final share R_{n+1}; XOR of all n+1
/// values yields the serialized tree bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdShareSet {
    pub ids: Vec<Vec<u8>>,
    pub last: Vec<u8>,
}

pub fn xor_share_ids<R: RngCore + CryptoRng>(
    tree: &SerializedTree,
    n: usize,
    rng: &mut R,
) -> Result<IdShareSet> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one block id".into()));
    }
    let secret = tree.to_bytes();
    let mut last = secret;
    let ids: Vec<Vec<u8>> = (0..n)
        .map(|_| {
            let mut id = vec![0u8; last.len()];
            rng.fill_bytes(&mut id);
            for (l, i) in last.iter_mut().zip(&id) {
                *l ^= i;
            }
            id
        })
        .collect();
    Ok(IdShareSet { ids, last })
}

/// XOR all n+1 shares back together. Order-insensitive.
pub fn xor_recover(ids: &[Vec<u8>], last: &[u8]) -> Result<Vec<u8>> {
    let mut out = last.to_vec();
    for id in ids {
        if id.len() != out.len() {
            return Err(Error::ShareLengthMismatch);
        }
        for (o, b) in out.iter_mut().zip(id) {
            *o ^= b;
        }
    }
    Ok(out)
}
