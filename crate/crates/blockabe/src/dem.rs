//! Hybrid payload encapsulation.
//!
//! The scheme's algebra produces a target-group mask e(g,g)^{α·q_i(0)} per
//! block; multiplying raw bytes into the target group is not a defined
//! operation, so the mask instead feeds HKDF-SHA256 and the derived one-time
//! key seals the payload with ChaCha20-Poly1305. The KDF context binds the
//! block index and block id, so payloads cannot be spliced across blocks.

use chacha20poly1305::aead::{Aead, KeyInit};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce};
use hkdf::Hkdf;
use sha2::Sha256;

use crate::error::{Error, Result};
use crate::pairing::TargetElement;

const KDF_SALT: &[u8] = b"blockabe-v1:payload-kdf";

/// Authentication tag overhead added by [`seal`].
pub const SEAL_OVERHEAD: usize = 16;

/// Derive the one-time payload key from the group-element mask and the
/// block's position and id.
pub fn derive_key(mask: &TargetElement, block_index: u32, block_id: &[u8]) -> [u8; 32] {
    let hk = Hkdf::<Sha256>::new(Some(KDF_SALT), &mask.to_bytes());
    let mut info = Vec::with_capacity(4 + block_id.len());
    info.extend_from_slice(&block_index.to_be_bytes());
    info.extend_from_slice(block_id);
    let mut key = [0u8; 32];
    hk.expand(&info, &mut key).expect("32 bytes is a valid hkdf output length");
    key
}

/// Authenticated encryption under a one-time key. The nonce is fixed: every
/// key is derived from a fresh per-block mask and never reused.
pub fn seal(key: &[u8; 32], plaintext: &[u8]) -> Vec<u8> {
    let cipher = ChaCha20Poly1305::new(Key::from_slice(key));
    cipher
        .encrypt(Nonce::from_slice(&[0u8; 12]), plaintext)
        .expect("chacha20poly1305 encryption is infallible for in-memory buffers")
}

/// Open a sealed payload; any mismatch of key or bytes fails authentication.
pub fn open(key: &[u8; 32], ciphertext: &[u8]) -> Result<Vec<u8>> {
    let cipher = ChaCha20Poly1305::new(Key::from_slice(key));
    cipher
        .decrypt(Nonce::from_slice(&[0u8; 12]), ciphertext)
        .map_err(|_| Error::Decode("payload authentication failed".into()))
}
