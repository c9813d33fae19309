//! The two ways to open a block: recombining leaf pairings over its own
//! sub-tree (ABE path) or deriving the mask from the parent block's embedded
//! E value and the difference element ΔC (SYM path). Both yield the same
//! bytes; the SYM path is what lets a requester who satisfies only the root
//! recover every chained block.
//!
//! ```text
//! cargo run --release --example dual_path
//! ```

use std::collections::BTreeMap;

use blockabe::abe::{self, SecurityLevel};
use blockabe::policy::{enumerate_blocks, parse_policy};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let (pk, mk) = abe::setup(SecurityLevel::Standard128, &mut rng);

    let tree = parse_policy(b"(A and B) or (C and D)").unwrap();
    let subs = enumerate_blocks(&tree).unwrap();
    let (_, blocks) = abe::encrypt(&pk, &mk, b"both paths agree", &tree, &mut rng).unwrap();

    // this key satisfies everything, so every block is openable both ways
    let sk = abe::keygen(&pk, &mk, &tree.attributes(), &mut rng).unwrap();

    // ABE path for the A∧B sub-tree (block 2)
    let mut child_values = BTreeMap::new();
    for leaf in &subs[1].leaf_children {
        child_values.insert(leaf.index, abe::decrypt_leaf(&blocks[1], &sk, leaf).unwrap());
    }
    let f_2 = abe::decrypt_interior(&child_values, 2).unwrap();
    let (db_abe, _) = abe::ctb_abe_dec(&blocks[1], &sk, &f_2).unwrap();
    println!("block 2 via ABE path: {} payload bytes", db_abe.len());

    // open the root to learn E_1, then take the SYM path for block 2
    let mut root_values = BTreeMap::new();
    for child in &subs[0].interior_children {
        if child.block_index == 2 {
            root_values.insert(child.index, f_2.clone());
        }
    }
    let f_1 = abe::decrypt_interior(&root_values, 1).unwrap();
    let (_, e_1) = abe::ctb_abe_dec(&blocks[0], &sk, &f_1).unwrap();
    let (db_sym, _) = abe::ctb_sym_dec(&blocks[1], &e_1, &sk).unwrap();
    println!("block 2 via SYM path: {} payload bytes", db_sym.len());

    assert_eq!(db_abe, db_sym);
    println!("outputs are byte-identical");

    // block 1 carries no ΔC: it has no parent to chain from
    assert!(blocks[0].delta_c.is_none());
    assert!(abe::ctb_sym_dec(&blocks[0], &e_1, &sk).is_err());
    println!("block 1 has no SYM path, as required");

    // the full decryptor prefers ABE where a sub-tree is satisfied and
    // falls back to SYM elsewhere; with only {A, B} held, block 3 chains
    let sk_ab = abe::keygen(
        &pk,
        &mk,
        &["A".to_string(), "B".to_string()].into_iter().collect(),
        &mut rng,
    )
    .unwrap();
    let (manifest, blocks) = abe::encrypt(&pk, &mk, b"chained", &tree, &mut rng).unwrap();
    let out = abe::decrypt_with_report(&manifest, blocks, &sk_ab).unwrap();
    for report in &out.reports {
        println!("block {} path: {:?}", report.index, report.path);
    }
}
