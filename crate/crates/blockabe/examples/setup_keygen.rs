//! Key ceremony: system setup, attribute-key issue, and the key-file
//! encodings the CLI reads and writes.
//!
//! ```text
//! cargo run --release --example setup_keygen
//! ```

use blockabe::abe::{self, SecurityLevel};
use blockabe::container;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);

    // The authority runs setup once and hands PK + MK to data owners.
    let (pk, mk) = abe::setup(SecurityLevel::Standard128, &mut rng);
    let digest = pk.digest();
    println!("group: {}", pk.descriptor);
    println!("parameter digest: {}", hex(&digest));

    // A requester registers with three attributes.
    let attrs = ["role:operator", "site:plant7", "clearance:2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let sk = abe::keygen(&pk, &mk, &attrs, &mut rng).expect("non-empty attribute set");
    println!("issued key over {} attributes: {:?}", sk.attrs.len(), sk.attrs);

    // Key material round-trips through the versioned TLV file formats.
    let pk_bytes = container::encode_public_params(&pk);
    let sk_bytes = container::encode_attribute_key(&sk, &digest);
    println!("pk file: {} bytes, sk file: {} bytes", pk_bytes.len(), sk_bytes.len());

    let pk_back = container::decode_public_params(&pk_bytes).expect("valid pk file");
    let (sk_back, digest_back) = container::decode_attribute_key(&sk_bytes).expect("valid sk file");
    assert_eq!(pk_back, pk);
    assert_eq!(sk_back, sk);
    assert_eq!(digest_back, digest);
    println!("files decode back to identical keys");
}
