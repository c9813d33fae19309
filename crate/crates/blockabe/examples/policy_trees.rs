//! The policy grammar and what the scheme does with a parsed tree: the
//! per-interior-node block partition, the disjoint root-branch attribute
//! sets, canonical serialization and the satisfaction oracle.
//!
//! ```text
//! cargo run --release --example policy_trees
//! ```

use std::collections::BTreeSet;

use blockabe::policy::{
    canonical_serialize, enumerate_blocks, parse_policy, parse_serialized,
    root_branch_partition, satisfies,
};

fn attrs(list: &[&str]) -> BTreeSet<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn main() {
    let text = "(lab:alpha and role:lead) or 2 of (dept:ops, dept:sec, dept:net)";
    let tree = parse_policy(text.as_bytes()).expect("well-formed policy");
    println!("policy: {text}");
    println!("nodes: {}, interior nodes (blocks): {}", tree.len(), tree.gate_count());

    // one two-level sub-tree per interior node, breadth-first from the root
    for block in enumerate_blocks(&tree).expect("gate root") {
        println!(
            "block {}: {} leaf children, {} interior children, parent block {:?}",
            block.block_index,
            block.leaf_children.len(),
            block.interior_children.len(),
            block.parent_block,
        );
    }

    // every attribute lands in exactly one root-branch set
    for (i, set) in root_branch_partition(&tree).iter().enumerate() {
        println!("branch set {}: {:?}", i + 1, set);
    }

    // the canonical encoding is what the id sharing protects
    let ser = canonical_serialize(&tree);
    println!("serialized tree: {} bytes (body + 32-byte digest)", ser.len());
    let back = parse_serialized(&ser.to_bytes()).expect("digest verifies");
    assert_eq!(back, tree);

    // threshold satisfaction
    for set in [
        attrs(&["lab:alpha", "role:lead"]),
        attrs(&["dept:ops", "dept:net"]),
        attrs(&["lab:alpha", "dept:ops"]),
    ] {
        println!("satisfies({set:?}) = {}", satisfies(&tree, &set));
    }

    // syntax errors carry byte positions
    let err = parse_policy(b"a and or b").unwrap_err();
    println!("parse error demo: {err}");
}
