//! The CP-ABE core: setup, key generation, per-block encryption and the six
//! decryption subroutines, with a hybrid (KEM/DEM) payload encoding.
//!
//! Every interior node of the access tree becomes one ciphertext block. A
//! block can be opened two ways: the ABE path recombines leaf pairings when
//! the block's sub-tree is satisfiable, and the SYM path derives the mask
//! from the parent block's embedded E value and the difference element ΔC.
//! Both paths produce the same group-element mask, so their outputs are
//! byte-identical.

use std::collections::{BTreeMap, BTreeSet};

use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use crate::chunker::{self, ChainedBlock};
use crate::dem;
use crate::error::{Error, RefusalStage, Result};
use crate::pairing::{hash_to_group, pair, Scalar, SourceElement, TargetElement, SOURCE_BYTES};
use crate::policy::{self, AccessTree, LeafChild, NodeId, SubTreePolicy};
use crate::sharing::{self, MaskedPointTable, ShareAssignment};

/// Supported parameter sets. One today: BLS12-381 with the dual-image
/// symmetric contract (≈128-bit security, group order > 2^250).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SecurityLevel {
    #[default]
    Standard128,
}

/// Stable description of the group instantiation and domain tags, recorded in
/// the public parameters and checked when key files are loaded.
pub fn group_descriptor() -> String {
    "BLS12-381 dual-image v1; scalar=32be; source=48c+96c; target=576c; \
     attr-dst=blockabe-v1:attr-hash"
        .to_string()
}

/// PK = {G_0, g, h = g^β, e(g,g)^α}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicParams {
    pub descriptor: String,
    pub g: SourceElement,
    pub h: SourceElement,
    pub a_t: TargetElement,
}

impl PublicParams {
    /// Digest binding ciphertexts and derived keys to one parameter set.
    pub fn digest(&self) -> [u8; 32] {
        let mut hash = Sha256::new();
        hash.update((self.descriptor.len() as u64).to_be_bytes());
        hash.update(self.descriptor.as_bytes());
        hash.update(self.g.to_bytes());
        hash.update(self.h.to_bytes());
        hash.update(self.a_t.to_bytes());
        hash.finalize().into()
    }
}

/// MK = {β, g^α, q}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterKey {
    pub beta: Scalar,
    pub g_alpha: SourceElement,
    pub q: Scalar,
}

/// Per-attribute key material: D_j = g^r · H(j)^{r_j} and D'_j = g^{r_j}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeComponent {
    pub d_j: SourceElement,
    pub d_j_prime: SourceElement,
}

/// SK = (S, D = g^{(α+r)/β}, D̂ = g^{r·q}, {D_j, D'_j}).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeKey {
    pub attrs: BTreeSet<String>,
    pub d: SourceElement,
    pub d_hat: SourceElement,
    pub components: BTreeMap<String, AttributeComponent>,
}

/// Per-leaf ciphertext components Ĉ = g^{q_y(0)}, Ĉ' = H(att(y))^{q_y(0)},
/// keyed by the leaf's index under its sub-tree's interior node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafComponent {
    pub index: u16,
    pub c_hat: SourceElement,
    pub c_hat_prime: SourceElement,
}

/// One ciphertext block CTB_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiphertextBlock {
    /// Random id R_i of length L_T; one share of the serialized tree.
    pub id: Vec<u8>,
    /// 1-based block index.
    pub index: u32,
    /// Sealed DB_i ‖ E_i.
    pub payload: Vec<u8>,
    /// C'_i = h^{q_i(0)}.
    pub c_prime: SourceElement,
    /// ΔC_i = g^{(s_parent − q_i(0))/q}; absent for block 1.
    pub delta_c: Option<SourceElement>,
    pub leaf_components: Vec<LeafComponent>,
    /// The masked point table A; carried by block n only.
    pub point_table: Option<MaskedPointTable>,
}

/// Byte range of one block inside the container's block section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpan {
    pub offset: u64,
    pub len: u64,
}

/// Header transmitted before the payload stream: everything the receiver
/// needs to run the attribute pre-filter and the integrity check up front.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub n: u32,
    /// L_T: length of the serialized tree and of every block id.
    pub tree_len: u32,
    pub params_digest: [u8; 32],
    pub ids: Vec<Vec<u8>>,
    pub table: MaskedPointTable,
    pub block_spans: Vec<BlockSpan>,
}

// ---------------------------------------------------------------------------
// Setup and key generation
// ---------------------------------------------------------------------------

/// Draw α, β, q and publish PK/MK per the scheme equations. β and q are
/// inverted later, so they are drawn nonzero.
pub fn setup<R: RngCore + CryptoRng>(
    level: SecurityLevel,
    rng: &mut R,
) -> (PublicParams, MasterKey) {
    let SecurityLevel::Standard128 = level;
    let g = SourceElement::generator();
    let alpha = Scalar::random(rng);
    let beta = Scalar::random_nonzero(rng);
    let q = Scalar::random_nonzero(rng);
    let pk = PublicParams {
        descriptor: group_descriptor(),
        g: g.clone(),
        h: g.exp(&beta),
        a_t: pair(&g, &g).exp(&alpha),
    };
    let mk = MasterKey { beta, g_alpha: g.exp(&alpha), q };
    (pk, mk)
}

/// Issue an attribute key for a non-empty attribute set S.
pub fn keygen<R: RngCore + CryptoRng>(
    pk: &PublicParams,
    mk: &MasterKey,
    attrs: &BTreeSet<String>,
    rng: &mut R,
) -> Result<AttributeKey> {
    if attrs.is_empty() {
        return Err(Error::EmptyAttributeSet);
    }
    let r = Scalar::random(rng);
    let g_r = pk.g.exp(&r);
    let beta_inv = mk.beta.inverse()?;
    let d = mk.g_alpha.mul(&g_r).exp(&beta_inv);
    let d_hat = pk.g.exp(&r.mul(&mk.q));
    let components = attrs
        .iter()
        .map(|attribute| {
            let r_j = Scalar::random(rng);
            let component = AttributeComponent {
                d_j: g_r.mul(&hash_to_group(attribute.as_bytes()).exp(&r_j)),
                d_j_prime: pk.g.exp(&r_j),
            };
            (attribute.clone(), component)
        })
        .collect();
    Ok(AttributeKey { attrs: attrs.clone(), d, d_hat, components })
}

// ---------------------------------------------------------------------------
// Encryption
// ---------------------------------------------------------------------------

/// Seal one data block under its two-level sub-tree.
///
/// Returns the block and the fresh scalar s_i that this block's children
/// need for their ΔC difference values. `s_parent` must be supplied for
/// every block except the root block.
#[allow(clippy::too_many_arguments)]
pub fn encrypt_block<R: RngCore + CryptoRng>(
    index: u32,
    db: &[u8],
    sub: &SubTreePolicy,
    shares: &ShareAssignment<Scalar>,
    pk: &PublicParams,
    mk: &MasterKey,
    s_parent: Option<&Scalar>,
    id: Vec<u8>,
    rng: &mut R,
) -> Result<(CiphertextBlock, Scalar)> {
    if (index == 1) != s_parent.is_none() {
        return Err(Error::InvalidInput(
            "s_parent must be supplied exactly for blocks after the first".into(),
        ));
    }
    let node_share = shares
        .share(sub.interior_node)
        .ok_or_else(|| Error::InvalidInput("missing share for interior node".into()))?;
    let q_inv = mk.q.inverse()?;
    let s_i = Scalar::random(rng);
    let e_i = pk.g.exp(&s_i.mul(&q_inv));

    let mask = pk.a_t.exp(&node_share);
    let key = dem::derive_key(&mask, index, &id);
    let mut plaintext = Vec::with_capacity(db.len() + SOURCE_BYTES);
    plaintext.extend_from_slice(db);
    plaintext.extend_from_slice(&e_i.to_bytes());
    let payload = dem::seal(&key, &plaintext);

    let delta_c = s_parent.map(|sp| pk.g.exp(&sp.sub(&node_share).mul(&q_inv)));
    let leaf_components = sub
        .leaf_children
        .iter()
        .map(|leaf| {
            let leaf_share = shares
                .share(leaf.node)
                .ok_or_else(|| Error::InvalidInput("missing share for leaf".into()))?;
            Ok(LeafComponent {
                index: leaf.index,
                c_hat: pk.g.exp(&leaf_share),
                c_hat_prime: hash_to_group(leaf.attribute.as_bytes()).exp(&leaf_share),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let block = CiphertextBlock {
        id,
        index,
        payload,
        c_prime: pk.h.exp(&node_share),
        delta_c,
        leaf_components,
        point_table: None,
    };
    Ok((block, s_i))
}

/// A prepared encryption emitting sealed blocks one at a time, so
/// transmission of block i can overlap the sealing of block i+1.
pub struct EncryptSession<'a, R: RngCore + CryptoRng> {
    pk: &'a PublicParams,
    mk: &'a MasterKey,
    rng: &'a mut R,
    subs: Vec<SubTreePolicy>,
    shares: ShareAssignment<Scalar>,
    chained: Vec<ChainedBlock>,
    ids: Vec<Vec<u8>>,
    table: MaskedPointTable,
    manifest: Manifest,
    block_scalars: BTreeMap<usize, Scalar>,
    next: usize,
}

impl<'a, R: RngCore + CryptoRng> EncryptSession<'a, R> {
    pub fn new(
        pk: &'a PublicParams,
        mk: &'a MasterKey,
        message: &[u8],
        tree: &AccessTree,
        rng: &'a mut R,
    ) -> Result<Self> {
        let subs = policy::enumerate_blocks(tree)?;
        let n = subs.len();

        let s = Scalar::random(rng);
        let shares = sharing::assign_shares(tree, s, rng);
        let chained = chunker::chain(&chunker::partition(message, n))?;

        let serialized = policy::canonical_serialize(tree);
        let id_shares = sharing::xor_share_ids(&serialized, n, rng)?;

        let root = tree.node(tree.root());
        let k = root.threshold().expect("enumerate_blocks guarantees a gate root");
        let t = root.children.len() as u16;
        let sets = policy::root_branch_partition(tree);
        let points = sharing::shamir_split_bytes(&id_shares.last, k, t, rng)?;
        let table = sharing::build_point_table(&sets, &points, k)?;

        let table_len = table.to_bytes().len();
        let mut offset = 0u64;
        let block_spans = subs
            .iter()
            .enumerate()
            .map(|(i, sub)| {
                let len = block_wire_len(
                    serialized.len(),
                    sub.leaf_children.len(),
                    chained[i].bytes.len() + SOURCE_BYTES + dem::SEAL_OVERHEAD,
                    i > 0,
                    (i + 1 == n).then_some(table_len),
                ) as u64;
                let span = BlockSpan { offset, len };
                offset += len;
                span
            })
            .collect();

        let manifest = Manifest {
            n: n as u32,
            tree_len: serialized.len() as u32,
            params_digest: pk.digest(),
            ids: id_shares.ids.clone(),
            table: table.clone(),
            block_spans,
        };

        Ok(EncryptSession {
            pk,
            mk,
            rng,
            subs,
            shares,
            chained,
            ids: id_shares.ids,
            table,
            manifest,
            block_scalars: BTreeMap::new(),
            next: 0,
        })
    }

    /// The manifest is complete before any block is sealed; transmit it first.
    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn block_count(&self) -> usize {
        self.subs.len()
    }

    /// Seal and emit the next block in enumeration order.
    pub fn next_block(&mut self) -> Option<Result<CiphertextBlock>> {
        if self.next >= self.subs.len() {
            return None;
        }
        let i = self.next;
        self.next += 1;
        let sub = &self.subs[i];
        let s_parent = sub.parent_block.map(|p| self.block_scalars[&p]);
        let result = encrypt_block(
            (i + 1) as u32,
            &self.chained[i].bytes,
            sub,
            &self.shares,
            self.pk,
            self.mk,
            s_parent.as_ref(),
            self.ids[i].clone(),
            self.rng,
        )
        .map(|(mut block, s_i)| {
            self.block_scalars.insert(i + 1, s_i);
            if i + 1 == self.subs.len() {
                block.point_table = Some(self.table.clone());
            }
            debug_assert_eq!(
                block.to_bytes().len() as u64,
                self.manifest.block_spans[i].len,
                "predicted wire length must match the sealed block"
            );
            block
        });
        Some(result)
    }
}

impl<R: RngCore + CryptoRng> Iterator for EncryptSession<'_, R> {
    type Item = Result<CiphertextBlock>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_block()
    }
}

/// Encrypt a message under an access tree: one ciphertext block per interior
/// node, in breadth-first order.
pub fn encrypt<R: RngCore + CryptoRng>(
    pk: &PublicParams,
    mk: &MasterKey,
    message: &[u8],
    tree: &AccessTree,
    rng: &mut R,
) -> Result<(Manifest, Vec<CiphertextBlock>)> {
    let mut session = EncryptSession::new(pk, mk, message, tree, rng)?;
    let manifest = session.manifest().clone();
    let blocks = session.by_ref().collect::<Result<Vec<_>>>()?;
    Ok((manifest, blocks))
}

// ---------------------------------------------------------------------------
// Decryption subroutines
// ---------------------------------------------------------------------------

/// The attribute pre-filter: unmask Shamir points with the requester's
/// attributes; k distinct points recover the final id share R_{n+1}.
pub fn att_check(block_n: &CiphertextBlock, attrs: &BTreeSet<String>) -> Result<Vec<u8>> {
    let table = block_n
        .point_table
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("block carries no point table".into()))?;
    att_check_table(table, attrs, block_n.id.len())
}

/// Manifest-based variant used by the streaming decryptor.
pub fn att_check_table(
    table: &MaskedPointTable,
    attrs: &BTreeSet<String>,
    tree_len: usize,
) -> Result<Vec<u8>> {
    let points = table.lookup_points(attrs);
    if points.len() < table.k as usize {
        return Err(Error::refused(
            RefusalStage::AttCheck,
            format!("{} of {} required branch points reachable", points.len(), table.k),
        ));
    }
    sharing::shamir_recover_bytes(&points, table.k, tree_len)
        .map_err(|e| Error::refused(RefusalStage::AttCheck, e.to_string()))
}

/// XOR all block ids with R_{n+1}; a valid self-authenticating tree falls out
/// iff every block id is present and unmodified. Order-insensitive.
pub fn ctb_integrity(ids: &[Vec<u8>], r_last: &[u8]) -> Result<AccessTree> {
    let bytes = sharing::xor_recover(ids, r_last)
        .map_err(|e| Error::refused(RefusalStage::Integrity, e.to_string()))?;
    policy::parse_serialized(&bytes)
        .map_err(|e| Error::refused(RefusalStage::Integrity, e.to_string()))
}

/// F_z = e(D_j, Ĉ_{i,z}) / e(D'_j, Ĉ'_{i,z}) = e(g,g)^{r·q_z(0)} for a held
/// attribute; refusal otherwise.
pub fn decrypt_leaf(
    block: &CiphertextBlock,
    sk: &AttributeKey,
    leaf: &LeafChild,
) -> Result<TargetElement> {
    let component = sk.components.get(&leaf.attribute).ok_or_else(|| {
        Error::refused(
            RefusalStage::Block(block.index),
            format!("attribute {:?} not held", leaf.attribute),
        )
    })?;
    let ct = block
        .leaf_components
        .iter()
        .find(|c| c.index == leaf.index)
        .ok_or_else(|| {
            Error::refused(
                RefusalStage::Block(block.index),
                format!("no leaf component at index {}", leaf.index),
            )
        })?;
    let numerator = pair(&component.d_j, &ct.c_hat);
    let denominator = pair(&component.d_j_prime, &ct.c_hat_prime);
    Ok(numerator.div(&denominator))
}

/// Recombine child values at a threshold gate: F_i = Π F_z^{Δ_{z,S}(0)} over
/// the k lowest available child indices.
pub fn decrypt_interior(
    child_values: &BTreeMap<u16, TargetElement>,
    threshold: u16,
) -> Result<TargetElement> {
    if child_values.len() < threshold as usize {
        return Err(Error::InsufficientShares {
            have: child_values.len(),
            need: threshold as usize,
        });
    }
    let chosen: Vec<(&u16, &TargetElement)> =
        child_values.iter().take(threshold as usize).collect();
    let xs: Vec<Scalar> = chosen.iter().map(|(i, _)| Scalar::from_u64(**i as u64)).collect();
    let mut acc = TargetElement::one();
    for ((i, f), x) in chosen.iter().zip(&xs) {
        let coeff = sharing::lagrange_coeff(*x, &xs, Scalar::zero())?;
        acc = acc.mul(&f.exp(&coeff));
        let _ = i;
    }
    Ok(acc)
}

fn split_payload(plaintext: Vec<u8>, block_index: u32) -> Result<(Vec<u8>, SourceElement)> {
    if plaintext.len() < SOURCE_BYTES {
        return Err(Error::refused(
            RefusalStage::Block(block_index),
            "payload shorter than an embedded E element",
        ));
    }
    let split = plaintext.len() - SOURCE_BYTES;
    let e = SourceElement::from_bytes(&plaintext[split..])
        .map_err(|e| Error::refused(RefusalStage::Block(block_index), e.to_string()))?;
    let mut db = plaintext;
    db.truncate(split);
    Ok((db, e))
}

/// ABE-path block opening: mask = e(C'_i, D) / F_i.
pub fn ctb_abe_dec(
    block: &CiphertextBlock,
    sk: &AttributeKey,
    f_i: &TargetElement,
) -> Result<(Vec<u8>, SourceElement)> {
    let mask = pair(&block.c_prime, &sk.d).div(f_i);
    let key = dem::derive_key(&mask, block.index, &block.id);
    let plaintext = dem::open(&key, &block.payload).map_err(|_| {
        Error::refused(RefusalStage::Block(block.index), "payload authentication failed")
    })?;
    split_payload(plaintext, block.index)
}

/// SYM-path block opening: E = E_parent / ΔC_i, then
/// mask = e(C'_i, D) / e(E, D̂).
pub fn ctb_sym_dec(
    block: &CiphertextBlock,
    e_parent: &SourceElement,
    sk: &AttributeKey,
) -> Result<(Vec<u8>, SourceElement)> {
    let delta = block.delta_c.as_ref().ok_or_else(|| {
        Error::refused(RefusalStage::Block(block.index), "block has no ΔC (no SYM path)")
    })?;
    let e = e_parent.div(delta);
    let mask = pair(&block.c_prime, &sk.d).div(&pair(&e, &sk.d_hat));
    let key = dem::derive_key(&mask, block.index, &block.id);
    let plaintext = dem::open(&key, &block.payload).map_err(|_| {
        Error::refused(RefusalStage::Block(block.index), "payload authentication failed")
    })?;
    split_payload(plaintext, block.index)
}

// ---------------------------------------------------------------------------
// Full decryption
// ---------------------------------------------------------------------------

/// Which path opened a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecryptPath {
    /// Leaf recombination over the block's own sub-tree.
    Abe,
    /// Mask derived from the parent block's payload via ΔC.
    Sym { parent: u32 },
}

/// Per-block record of how decryption proceeded; feeds the pipeline's
/// dependency analysis.
#[derive(Debug, Clone)]
pub struct BlockReport {
    pub index: u32,
    pub path: DecryptPath,
    /// Blocks whose components this block's opening needed (itself included).
    pub blocks_touched: BTreeSet<u32>,
    /// Wall-clock cost of opening this block.
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct DecryptOutcome {
    pub message: Vec<u8>,
    pub reports: Vec<BlockReport>,
}

struct DecryptState<'a, I: Iterator<Item = CiphertextBlock>> {
    manifest: &'a Manifest,
    sk: &'a AttributeKey,
    source: I,
    received: BTreeMap<u32, CiphertextBlock>,
    tree: AccessTree,
    subs: Vec<SubTreePolicy>,
    block_of_gate: BTreeMap<NodeId, u32>,
    /// Memoized F values per node with the blocks their computation touched.
    f_cache: BTreeMap<NodeId, (TargetElement, BTreeSet<u32>)>,
    e_values: BTreeMap<u32, SourceElement>,
}

impl<'a, I: Iterator<Item = CiphertextBlock>> DecryptState<'a, I> {
    fn pull_block(&mut self, index: u32) -> Result<()> {
        while !self.received.contains_key(&index) {
            let Some(block) = self.source.next() else {
                return Err(Error::refused(RefusalStage::Block(index), "block not delivered"));
            };
            let i = block.index;
            if i == 0 || i > self.manifest.n {
                return Err(Error::refused(
                    RefusalStage::Block(i),
                    "block index outside the manifest",
                ));
            }
            if block.id != self.manifest.ids[(i - 1) as usize] {
                return Err(Error::refused(
                    RefusalStage::Block(i),
                    "block id does not match the manifest",
                ));
            }
            self.received.insert(i, block);
        }
        Ok(())
    }

    /// Can the subtree at `node` be opened from leaves alone, and which
    /// blocks would that touch? Mirrors the deterministic lowest-index
    /// child selection of the actual computation.
    fn plan(&self, node: NodeId) -> Option<BTreeSet<u32>> {
        let n = self.tree.node(node);
        match n.kind {
            policy::NodeKind::Leaf { ref attribute } => {
                if self.sk.attrs.contains(attribute) {
                    let parent = n.parent.expect("leaves always hang off a gate");
                    Some([self.block_of_gate[&parent]].into())
                } else {
                    None
                }
            }
            policy::NodeKind::Gate { threshold } => {
                let mut touched = BTreeSet::new();
                let mut hit = 0u16;
                for &child in &n.children {
                    if let Some(t) = self.plan(child) {
                        touched.extend(t);
                        hit += 1;
                        if hit == threshold {
                            return Some(touched);
                        }
                    }
                }
                None
            }
        }
    }

    /// Compute F_node = e(g,g)^{r·q_node(0)} recursively, memoized.
    fn compute_f(&mut self, node: NodeId) -> Result<(TargetElement, BTreeSet<u32>)> {
        if let Some(hit) = self.f_cache.get(&node) {
            return Ok(hit.clone());
        }
        let n = self.tree.node(node).clone();
        let result = match n.kind {
            policy::NodeKind::Leaf { ref attribute } => {
                let parent = n.parent.expect("leaves always hang off a gate");
                let block_index = self.block_of_gate[&parent];
                self.pull_block(block_index)?;
                let block = &self.received[&block_index];
                let leaf = LeafChild {
                    node,
                    attribute: attribute.clone(),
                    index: n.index,
                };
                let f = decrypt_leaf(block, self.sk, &leaf)?;
                (f, [block_index].into())
            }
            policy::NodeKind::Gate { threshold } => {
                let mut child_values: BTreeMap<u16, TargetElement> = BTreeMap::new();
                let mut touched = BTreeSet::new();
                for &child in &n.children {
                    if child_values.len() == threshold as usize {
                        break;
                    }
                    if self.plan(child).is_some() {
                        let (f, t) = self.compute_f(child)?;
                        child_values.insert(self.tree.node(child).index, f);
                        touched.extend(t);
                    }
                }
                let f = decrypt_interior(&child_values, threshold)?;
                (f, touched)
            }
        };
        self.f_cache.insert(node, result.clone());
        Ok(result)
    }

    fn decrypt_block(&mut self, i: u32) -> Result<(ChainedBlock, BlockReport)> {
        let begin = std::time::Instant::now();
        let sub = self.subs[(i - 1) as usize].clone();
        let interior = sub.interior_node;
        let path = if self.plan(interior).is_some() {
            DecryptPath::Abe
        } else if let Some(parent) = sub.parent_block {
            if self.e_values.contains_key(&(parent as u32)) {
                DecryptPath::Sym { parent: parent as u32 }
            } else {
                return Err(Error::refused(
                    RefusalStage::Block(i),
                    "sub-tree unsatisfied and parent mask unavailable",
                ));
            }
        } else {
            return Err(Error::refused(
                RefusalStage::Block(i),
                "attribute set does not satisfy the access tree",
            ));
        };

        self.pull_block(i)?;
        let (db, e_i, touched) = match path {
            DecryptPath::Abe => {
                let (f, mut touched) = self.compute_f(interior)?;
                touched.insert(i);
                let block = &self.received[&i];
                let (db, e_i) = ctb_abe_dec(block, self.sk, &f)?;
                (db, e_i, touched)
            }
            DecryptPath::Sym { parent } => {
                let e_parent = self.e_values[&parent].clone();
                let block = &self.received[&i];
                let (db, e_i) = ctb_sym_dec(block, &e_parent, self.sk)?;
                (db, e_i, [i].into())
            }
        };
        self.e_values.insert(i, e_i);
        Ok((
            ChainedBlock { index: i, bytes: db },
            BlockReport {
                index: i,
                path,
                blocks_touched: touched,
                seconds: begin.elapsed().as_secs_f64(),
            },
        ))
    }
}

/// Run the full decryption flow: attribute pre-filter, integrity check, tree
/// recovery, per-block opening in stream order, unchain and reassemble.
///
/// Blocks may be handed in lazily; they are pulled from the iterator only
/// when a decryption step needs them.
pub fn decrypt_with_report(
    manifest: &Manifest,
    blocks: impl IntoIterator<Item = CiphertextBlock>,
    sk: &AttributeKey,
) -> Result<DecryptOutcome> {
    let r_last = att_check_table(&manifest.table, &sk.attrs, manifest.tree_len as usize)?;
    let tree = ctb_integrity(&manifest.ids, &r_last)?;
    let subs = policy::enumerate_blocks(&tree)
        .map_err(|e| Error::refused(RefusalStage::Integrity, e.to_string()))?;
    if subs.len() != manifest.n as usize {
        return Err(Error::refused(
            RefusalStage::Integrity,
            "recovered tree disagrees with the manifest block count",
        ));
    }
    let block_of_gate =
        subs.iter().map(|s| (s.interior_node, s.block_index as u32)).collect();

    let mut state = DecryptState {
        manifest,
        sk,
        source: blocks.into_iter(),
        received: BTreeMap::new(),
        tree,
        subs,
        block_of_gate,
        f_cache: BTreeMap::new(),
        e_values: BTreeMap::new(),
    };

    let mut chained = Vec::with_capacity(manifest.n as usize);
    let mut reports = Vec::with_capacity(manifest.n as usize);
    for i in 1..=manifest.n {
        let (db, report) = state.decrypt_block(i)?;
        chained.push(db);
        reports.push(report);
    }

    let plain = chunker::unchain(&chained)
        .map_err(|e| Error::refused(RefusalStage::Reassembly, e.to_string()))?;
    let message = chunker::reassemble(&plain)
        .map_err(|e| Error::refused(RefusalStage::Reassembly, e.to_string()))?;
    Ok(DecryptOutcome { message, reports })
}

/// [`decrypt_with_report`] without the per-block reports.
pub fn decrypt(
    manifest: &Manifest,
    blocks: impl IntoIterator<Item = CiphertextBlock>,
    sk: &AttributeKey,
) -> Result<Vec<u8>> {
    decrypt_with_report(manifest, blocks, sk).map(|o| o.message)
}

// ---------------------------------------------------------------------------
// Wire formats
// ---------------------------------------------------------------------------

/// Exact wire length of a block before it is sealed, so manifests can be
/// emitted ahead of the payload stream.
pub fn block_wire_len(
    tree_len: usize,
    leaf_count: usize,
    payload_len: usize,
    has_delta: bool,
    table_len: Option<usize>,
) -> usize {
    tree_len
        + 4                                   // index
        + SOURCE_BYTES                        // C'
        + 1 + if has_delta { SOURCE_BYTES } else { 0 }
        + 2 + leaf_count * (2 + 2 * SOURCE_BYTES)
        + 4 + payload_len
        + 1 + table_len.map_or(0, |l| 4 + l)
}

impl CiphertextBlock {
    /// id ‖ index ‖ C' ‖ ΔC flag+element ‖ leaf records ‖ payload ‖ table.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.id);
        out.extend_from_slice(&self.index.to_be_bytes());
        out.extend_from_slice(&self.c_prime.to_bytes());
        match &self.delta_c {
            Some(delta) => {
                out.push(1);
                out.extend_from_slice(&delta.to_bytes());
            }
            None => out.push(0),
        }
        out.extend_from_slice(&(self.leaf_components.len() as u16).to_be_bytes());
        for leaf in &self.leaf_components {
            out.extend_from_slice(&leaf.index.to_be_bytes());
            out.extend_from_slice(&leaf.c_hat.to_bytes());
            out.extend_from_slice(&leaf.c_hat_prime.to_bytes());
        }
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        match &self.point_table {
            Some(table) => {
                let bytes = table.to_bytes();
                out.push(1);
                out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
                out.extend_from_slice(&bytes);
            }
            None => out.push(0),
        }
        out
    }

    /// Decode a block; `tree_len` (the id width) comes from the manifest.
    pub fn from_bytes(bytes: &[u8], tree_len: usize) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let id = r.take(tree_len)?.to_vec();
        let index = u32::from_be_bytes(r.take(4)?.try_into().unwrap());
        let c_prime = SourceElement::from_bytes(r.take(SOURCE_BYTES)?)?;
        let delta_c = match r.take(1)?[0] {
            0 => None,
            1 => Some(SourceElement::from_bytes(r.take(SOURCE_BYTES)?)?),
            other => return Err(Error::Decode(format!("bad ΔC flag {other}"))),
        };
        let leaf_count = u16::from_be_bytes(r.take(2)?.try_into().unwrap());
        let mut leaf_components = Vec::with_capacity(leaf_count as usize);
        for _ in 0..leaf_count {
            let index = u16::from_be_bytes(r.take(2)?.try_into().unwrap());
            let c_hat = SourceElement::from_bytes(r.take(SOURCE_BYTES)?)?;
            let c_hat_prime = SourceElement::from_bytes(r.take(SOURCE_BYTES)?)?;
            leaf_components.push(LeafComponent { index, c_hat, c_hat_prime });
        }
        let payload_len = u32::from_be_bytes(r.take(4)?.try_into().unwrap()) as usize;
        let payload = r.take(payload_len)?.to_vec();
        let point_table = match r.take(1)?[0] {
            0 => None,
            1 => {
                let table_len = u32::from_be_bytes(r.take(4)?.try_into().unwrap()) as usize;
                Some(MaskedPointTable::from_bytes(r.take(table_len)?)?)
            }
            other => return Err(Error::Decode(format!("bad table flag {other}"))),
        };
        r.finish()?;
        Ok(CiphertextBlock { id, index, payload, c_prime, delta_c, leaf_components, point_table })
    }
}

impl Manifest {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.n.to_be_bytes());
        out.extend_from_slice(&self.tree_len.to_be_bytes());
        out.extend_from_slice(&self.params_digest);
        for id in &self.ids {
            out.extend_from_slice(id);
        }
        let table = self.table.to_bytes();
        out.extend_from_slice(&(table.len() as u32).to_be_bytes());
        out.extend_from_slice(&table);
        for span in &self.block_spans {
            out.extend_from_slice(&span.offset.to_be_bytes());
            out.extend_from_slice(&span.len.to_be_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let n = u32::from_be_bytes(r.take(4)?.try_into().unwrap());
        if n == 0 {
            return Err(Error::Decode("manifest declares zero blocks".into()));
        }
        let tree_len = u32::from_be_bytes(r.take(4)?.try_into().unwrap());
        if (tree_len as usize) < policy::MIN_SERIALIZED_TREE_LEN {
            return Err(Error::Decode("declared tree length below the format minimum".into()));
        }
        let params_digest: [u8; 32] = r.take(32)?.try_into().unwrap();
        // capacity from the remaining input, not the untrusted count
        let mut ids = Vec::new();
        for _ in 0..n {
            ids.push(r.take(tree_len as usize)?.to_vec());
        }
        let table_len = u32::from_be_bytes(r.take(4)?.try_into().unwrap()) as usize;
        let table = MaskedPointTable::from_bytes(r.take(table_len)?)?;
        let mut block_spans = Vec::new();
        for _ in 0..n {
            let offset = u64::from_be_bytes(r.take(8)?.try_into().unwrap());
            let len = u64::from_be_bytes(r.take(8)?.try_into().unwrap());
            block_spans.push(BlockSpan { offset, len });
        }
        r.finish()?;
        Ok(Manifest { n, tree_len, params_digest, ids, table, block_spans })
    }
}

/// Bounds-checked cursor over a byte slice.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.pos + len > self.bytes.len() {
            return Err(Error::Decode("unexpected end of input".into()));
        }
        let out = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    pub(crate) fn finish(self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(Error::Decode("trailing bytes".into()));
        }
        Ok(())
    }
}
