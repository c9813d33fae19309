//! End-to-end encryption: a message is partitioned per interior node,
//! XOR-chained, sealed block by block, and recovered by a satisfying key.
//! Keys that pass the pre-filter but not the policy are refused at block 1.
//!
//! ```text
//! cargo run --release --example encrypt_decrypt
//! ```

use std::collections::BTreeSet;

use blockabe::abe::{self, SecurityLevel};
use blockabe::error::Error;
use blockabe::policy::parse_policy;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn attrs(list: &[&str]) -> BTreeSet<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let (pk, mk) = abe::setup(SecurityLevel::Standard128, &mut rng);

    let tree = parse_policy(b"(meter and zone:north) or (auditor and clearance:high)")
        .expect("well-formed policy");
    let mut message = vec![0u8; 100_000];
    rng.fill_bytes(&mut message);

    let (manifest, blocks) =
        abe::encrypt(&pk, &mk, &message, &tree, &mut rng).expect("encryption succeeds");
    println!(
        "{} blocks, ids of {} bytes each, container payload {} bytes",
        manifest.n,
        manifest.tree_len,
        manifest.block_spans.iter().map(|s| s.len).sum::<u64>()
    );

    // a satisfying key recovers the message
    let sk = abe::keygen(&pk, &mk, &attrs(&["meter", "zone:north"]), &mut rng).unwrap();
    let out = abe::decrypt_with_report(&manifest, blocks.clone(), &sk).expect("satisfying key");
    assert_eq!(out.message, message);
    for report in &out.reports {
        println!("block {} opened via {:?}", report.index, report.path);
    }

    // {meter, auditor} touches both branches, so the pre-filter passes,
    // but neither branch is satisfied: refusal at block 1
    let sk = abe::keygen(&pk, &mk, &attrs(&["meter", "auditor"]), &mut rng).unwrap();
    match abe::decrypt(&manifest, blocks.clone(), &sk) {
        Err(Error::Refused(r)) => println!("filter-passing non-satisfying key: {r}"),
        other => panic!("expected a refusal, got {other:?}"),
    }

    // an unrelated key is stopped by the attribute pre-filter itself
    let sk = abe::keygen(&pk, &mk, &attrs(&["visitor"]), &mut rng).unwrap();
    match abe::decrypt(&manifest, blocks, &sk) {
        Err(Error::Refused(r)) => println!("unrelated key: {r}"),
        other => panic!("expected a refusal, got {other:?}"),
    }
}
