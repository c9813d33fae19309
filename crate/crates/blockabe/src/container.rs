//! Versioned tag-length-value file envelopes for key material and
//! ciphertext containers.
//!
//! Every file starts with a kind-specific 4-byte magic and a version byte,
//! followed by TLV records in a fixed order. Unknown tags, reordered tags
//! and trailing bytes are rejected; all integers are big-endian, so files
//! survive byte-exact copies across machines.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::abe::{
    group_descriptor, AttributeComponent, AttributeKey, CiphertextBlock, Manifest, MasterKey,
    PublicParams,
};
use crate::error::{Error, RefusalStage, Result};
use crate::pairing::{Scalar, SourceElement, TargetElement, SOURCE_BYTES};

pub const FILE_VERSION: u8 = 0x01;
pub const MAGIC_PUBLIC: &[u8; 4] = b"ABPK";
pub const MAGIC_MASTER: &[u8; 4] = b"ABMK";
pub const MAGIC_ATTRKEY: &[u8; 4] = b"ABSK";
pub const MAGIC_CONTAINER: &[u8; 4] = b"ABCT";

fn push_tlv(out: &mut Vec<u8>, tag: u8, value: &[u8]) {
    out.push(tag);
    out.extend_from_slice(&(value.len() as u32).to_be_bytes());
    out.extend_from_slice(value);
}

struct Envelope<'a> {
    body: &'a [u8],
    pos: usize,
}

impl<'a> Envelope<'a> {
    fn open(bytes: &'a [u8], magic: &[u8; 4]) -> Result<Self> {
        if bytes.len() < 5 {
            return Err(Error::Decode("file too short for an envelope".into()));
        }
        if &bytes[..4] != magic {
            return Err(Error::Decode(format!(
                "bad magic: expected {:?}",
                std::str::from_utf8(magic).unwrap_or("?")
            )));
        }
        if bytes[4] != FILE_VERSION {
            return Err(Error::Decode(format!("unsupported file version {}", bytes[4])));
        }
        Ok(Envelope { body: &bytes[5..], pos: 0 })
    }

    /// The next record, which must carry exactly the expected tag.
    fn expect(&mut self, tag: u8) -> Result<&'a [u8]> {
        if self.pos + 5 > self.body.len() {
            return Err(Error::Decode(format!("missing record {tag}")));
        }
        let got = self.body[self.pos];
        if got != tag {
            return Err(Error::Decode(format!("unknown or out-of-order tag {got}, wanted {tag}")));
        }
        let len = u32::from_be_bytes(
            self.body[self.pos + 1..self.pos + 5].try_into().expect("4 bytes"),
        ) as usize;
        self.pos += 5;
        if self.pos + len > self.body.len() {
            return Err(Error::Decode(format!("record {tag} truncated")));
        }
        let value = &self.body[self.pos..self.pos + len];
        self.pos += len;
        Ok(value)
    }

    fn finish(self) -> Result<()> {
        if self.pos != self.body.len() {
            return Err(Error::Decode("trailing bytes after final record".into()));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Public parameters
// ---------------------------------------------------------------------------

pub fn encode_public_params(pk: &PublicParams) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC_PUBLIC);
    out.push(FILE_VERSION);
    push_tlv(&mut out, 1, pk.descriptor.as_bytes());
    push_tlv(&mut out, 2, &pk.g.to_bytes());
    push_tlv(&mut out, 3, &pk.h.to_bytes());
    push_tlv(&mut out, 4, &pk.a_t.to_bytes());
    out
}

pub fn decode_public_params(bytes: &[u8]) -> Result<PublicParams> {
    let mut env = Envelope::open(bytes, MAGIC_PUBLIC)?;
    let descriptor = String::from_utf8(env.expect(1)?.to_vec())
        .map_err(|_| Error::Decode("descriptor is not utf-8".into()))?;
    if descriptor != group_descriptor() {
        return Err(Error::Decode(format!("unsupported group descriptor {descriptor:?}")));
    }
    let g = SourceElement::from_bytes(env.expect(2)?)?;
    let h = SourceElement::from_bytes(env.expect(3)?)?;
    let a_t = TargetElement::from_bytes(env.expect(4)?)?;
    env.finish()?;
    Ok(PublicParams { descriptor, g, h, a_t })
}

// ---------------------------------------------------------------------------
// Master key
// ---------------------------------------------------------------------------

pub fn encode_master_key(mk: &MasterKey, params_digest: &[u8; 32]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC_MASTER);
    out.push(FILE_VERSION);
    push_tlv(&mut out, 1, &mk.beta.to_bytes());
    push_tlv(&mut out, 2, &mk.g_alpha.to_bytes());
    push_tlv(&mut out, 3, &mk.q.to_bytes());
    push_tlv(&mut out, 4, params_digest);
    out
}

pub fn decode_master_key(bytes: &[u8]) -> Result<(MasterKey, [u8; 32])> {
    let mut env = Envelope::open(bytes, MAGIC_MASTER)?;
    let beta = Scalar::from_bytes(env.expect(1)?)?;
    let g_alpha = SourceElement::from_bytes(env.expect(2)?)?;
    let q = Scalar::from_bytes(env.expect(3)?)?;
    let digest: [u8; 32] = env
        .expect(4)?
        .try_into()
        .map_err(|_| Error::Decode("parameter digest must be 32 bytes".into()))?;
    env.finish()?;
    if beta.is_zero() || q.is_zero() {
        return Err(Error::Decode("master key exponents must be nonzero".into()));
    }
    Ok((MasterKey { beta, g_alpha, q }, digest))
}

// ---------------------------------------------------------------------------
// Attribute key
// ---------------------------------------------------------------------------

pub fn encode_attribute_key(sk: &AttributeKey, params_digest: &[u8; 32]) -> Vec<u8> {
    let mut attrs = Vec::new();
    attrs.extend_from_slice(&(sk.attrs.len() as u32).to_be_bytes());
    for a in &sk.attrs {
        attrs.extend_from_slice(&(a.len() as u16).to_be_bytes());
        attrs.extend_from_slice(a.as_bytes());
    }
    let mut components = Vec::new();
    components.extend_from_slice(&(sk.components.len() as u32).to_be_bytes());
    for (a, c) in &sk.components {
        components.extend_from_slice(&(a.len() as u16).to_be_bytes());
        components.extend_from_slice(a.as_bytes());
        components.extend_from_slice(&c.d_j.to_bytes());
        components.extend_from_slice(&c.d_j_prime.to_bytes());
    }
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC_ATTRKEY);
    out.push(FILE_VERSION);
    push_tlv(&mut out, 1, &attrs);
    push_tlv(&mut out, 2, &sk.d.to_bytes());
    push_tlv(&mut out, 3, &sk.d_hat.to_bytes());
    push_tlv(&mut out, 4, &components);
    push_tlv(&mut out, 5, params_digest);
    out
}

pub fn decode_attribute_key(bytes: &[u8]) -> Result<(AttributeKey, [u8; 32])> {
    let mut env = Envelope::open(bytes, MAGIC_ATTRKEY)?;

    let attrs_blob = env.expect(1)?;
    let mut r = crate::abe::Reader::new(attrs_blob);
    let count = u32::from_be_bytes(r.take(4)?.try_into().unwrap());
    let mut attrs = BTreeSet::new();
    for _ in 0..count {
        let len = u16::from_be_bytes(r.take(2)?.try_into().unwrap()) as usize;
        let a = String::from_utf8(r.take(len)?.to_vec())
            .map_err(|_| Error::Decode("attribute is not utf-8".into()))?;
        attrs.insert(a);
    }
    r.finish()?;

    let d = SourceElement::from_bytes(env.expect(2)?)?;
    let d_hat = SourceElement::from_bytes(env.expect(3)?)?;

    let comp_blob = env.expect(4)?;
    let mut r = crate::abe::Reader::new(comp_blob);
    let count = u32::from_be_bytes(r.take(4)?.try_into().unwrap());
    let mut components = BTreeMap::new();
    for _ in 0..count {
        let len = u16::from_be_bytes(r.take(2)?.try_into().unwrap()) as usize;
        let a = String::from_utf8(r.take(len)?.to_vec())
            .map_err(|_| Error::Decode("attribute is not utf-8".into()))?;
        let d_j = SourceElement::from_bytes(r.take(SOURCE_BYTES)?)?;
        let d_j_prime = SourceElement::from_bytes(r.take(SOURCE_BYTES)?)?;
        components.insert(a, AttributeComponent { d_j, d_j_prime });
    }
    r.finish()?;

    let digest: [u8; 32] = env
        .expect(5)?
        .try_into()
        .map_err(|_| Error::Decode("parameter digest must be 32 bytes".into()))?;
    env.finish()?;

    if attrs.iter().collect::<Vec<_>>() != components.keys().collect::<Vec<_>>() {
        return Err(Error::Decode("attribute list and key components disagree".into()));
    }
    Ok((AttributeKey { attrs, d, d_hat, components }, digest))
}

// ---------------------------------------------------------------------------
// Ciphertext container
// ---------------------------------------------------------------------------

pub fn encode_container(manifest: &Manifest, blocks: &[CiphertextBlock]) -> Vec<u8> {
    let mut section = Vec::new();
    for block in blocks {
        section.extend_from_slice(&block.to_bytes());
    }
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC_CONTAINER);
    out.push(FILE_VERSION);
    push_tlv(&mut out, 1, &manifest.to_bytes());
    push_tlv(&mut out, 2, &section);
    out
}

/// Parse a container. A block section that does not cover exactly the spans
/// the manifest promises is a ciphertext-integrity refusal (a dropped or
/// truncated block), not a mere decode error.
pub fn decode_container(bytes: &[u8]) -> Result<(Manifest, Vec<CiphertextBlock>)> {
    let mut env = Envelope::open(bytes, MAGIC_CONTAINER)?;
    let manifest = Manifest::from_bytes(env.expect(1)?)?;
    let section = env.expect(2)?;
    env.finish()?;

    let expected_len: u64 = manifest
        .block_spans
        .iter()
        .try_fold(0u64, |acc, s| acc.checked_add(s.len))
        .ok_or_else(|| Error::Decode("block spans overflow".into()))?;
    if section.len() as u64 != expected_len {
        return Err(Error::refused(
            RefusalStage::Integrity,
            format!(
                "block section holds {} bytes but the manifest promises {}",
                section.len(),
                expected_len
            ),
        ));
    }
    let mut blocks = Vec::with_capacity(manifest.n as usize);
    let mut cursor = 0u64;
    for (i, span) in manifest.block_spans.iter().enumerate() {
        if span.offset != cursor {
            return Err(Error::refused(
                RefusalStage::Integrity,
                format!("block {} span is not contiguous", i + 1),
            ));
        }
        let slice = &section[span.offset as usize..(span.offset + span.len) as usize];
        blocks.push(CiphertextBlock::from_bytes(slice, manifest.tree_len as usize)?);
        cursor += span.len;
    }
    Ok((manifest, blocks))
}

// ---------------------------------------------------------------------------
// Atomic file I/O
// ---------------------------------------------------------------------------

/// Write via a temporary sibling and rename, so failures leave no partial
/// file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("part")
    ));
    let write = std::fs::write(&tmp, bytes);
    match write {
        Ok(()) => std::fs::rename(&tmp, path).map_err(|e| {
            let _ = std::fs::remove_file(&tmp);
            Error::Io(e)
        }),
        Err(e) => {
            let _ = std::fs::remove_file(&tmp);
            Err(Error::Io(e))
        }
    }
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    Ok(std::fs::read(path)?)
}
