//! Threshold access trees: parsing, per-interior-node partition, canonical
//! serialization and the satisfaction oracle.
//!
//! Grammar (infix `and` / `or` bind tighter-to-looser, plus explicit
//! thresholds):
//!
//! ```text
//! expr := term ("or" term)*
//! term := factor ("and" factor)*
//! factor := attribute | "(" expr ")" | int "of" "(" expr ("," expr)* ")"
//! attribute := [A-Za-z0-9_:.-]+
//! ```
//!
//! `and` maps to a (c of c) gate, `or` to (1 of c), `k of (…)` to (k of c).
//! Child indices are assigned left to right starting at 1; they are the
//! evaluation points of the share polynomials.

use std::collections::{BTreeSet, VecDeque};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Index into the tree's node arena.
pub type NodeId = usize;

pub const TREE_FORMAT_VERSION: u8 = 0x01;
/// Width of the serialized-tree digest.
pub const TREE_DIGEST_BYTES: usize = 32;
/// Smallest possible serialized tree: header, one node record, digest.
pub const MIN_SERIALIZED_TREE_LEN: usize = 1 + 4 + 7 + TREE_DIGEST_BYTES;
/// Nesting bound for parsed and deserialized trees; recursive evaluation
/// must not be an attacker-controlled stack depth.
pub const MAX_TREE_DEPTH: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    /// Threshold gate satisfied by any `threshold` of its children.
    Gate { threshold: u16 },
    /// Attribute leaf.
    Leaf { attribute: String },
}

#[derive(Debug, Clone)]
pub struct Node {
    pub kind: NodeKind,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
    /// Position under the parent, 1-based (the polynomial evaluation point);
    /// 0 for the root.
    pub index: u16,
}

impl Node {
    pub fn is_gate(&self) -> bool {
        matches!(self.kind, NodeKind::Gate { .. })
    }

    pub fn attribute(&self) -> Option<&str> {
        match &self.kind {
            NodeKind::Leaf { attribute } => Some(attribute),
            NodeKind::Gate { .. } => None,
        }
    }

    pub fn threshold(&self) -> Option<u16> {
        match self.kind {
            NodeKind::Gate { threshold } => Some(threshold),
            NodeKind::Leaf { .. } => None,
        }
    }
}

/// A validated threshold access tree.
#[derive(Debug, Clone)]
pub struct AccessTree {
    nodes: Vec<Node>,
    root: NodeId,
}

impl AccessTree {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        0..self.nodes.len()
    }

    /// Number of interior (gate) nodes; the block count n.
    pub fn gate_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_gate()).count()
    }

    /// Distinct attribute strings over all leaves.
    pub fn attributes(&self) -> BTreeSet<String> {
        self.nodes.iter().filter_map(|n| n.attribute().map(str::to_string)).collect()
    }

    /// Leaf node ids in the subtree rooted at `id` (preorder).
    pub fn leaves_below(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(cur) = stack.pop() {
            let node = &self.nodes[cur];
            if node.is_gate() {
                stack.extend(node.children.iter().rev().copied());
            } else {
                out.push(cur);
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::InvalidTree("empty tree".into()));
        }
        if self.root >= self.nodes.len() {
            return Err(Error::InvalidTree("root id out of range".into()));
        }
        if self.nodes[self.root].parent.is_some() {
            return Err(Error::InvalidTree("root has a parent".into()));
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![(self.root, 1usize)];
        while let Some((id, depth)) = stack.pop() {
            if seen[id] {
                return Err(Error::InvalidTree("node reachable twice".into()));
            }
            if depth > MAX_TREE_DEPTH {
                return Err(Error::InvalidTree(format!(
                    "tree deeper than {MAX_TREE_DEPTH}"
                )));
            }
            seen[id] = true;
            let node = &self.nodes[id];
            match node.kind {
                NodeKind::Gate { threshold } => {
                    let c = node.children.len();
                    if c == 0 {
                        return Err(Error::InvalidTree("gate with no children".into()));
                    }
                    if threshold == 0 || threshold as usize > c {
                        return Err(Error::InvalidTree(format!(
                            "threshold {threshold} outside 1..={c}"
                        )));
                    }
                    if c > u16::MAX as usize {
                        return Err(Error::InvalidTree("too many children".into()));
                    }
                    for (i, &child) in node.children.iter().enumerate() {
                        if child >= self.nodes.len() {
                            return Err(Error::InvalidTree("child id out of range".into()));
                        }
                        let cn = &self.nodes[child];
                        if cn.parent != Some(id) || cn.index as usize != i + 1 {
                            return Err(Error::InvalidTree(
                                "child parent/index inconsistent".into(),
                            ));
                        }
                        stack.push((child, depth + 1));
                    }
                }
                NodeKind::Leaf { ref attribute } => {
                    if !node.children.is_empty() {
                        return Err(Error::InvalidTree("leaf with children".into()));
                    }
                    if attribute.is_empty() {
                        return Err(Error::InvalidTree("empty attribute".into()));
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidTree("unreachable node".into()));
        }
        Ok(())
    }
}

impl PartialEq for AccessTree {
    /// Structural equality; node ids are construction artifacts.
    fn eq(&self, other: &Self) -> bool {
        canonical_serialize(self).body == canonical_serialize(other).body
    }
}

impl Eq for AccessTree {}

/// Incremental tree constructor used by the parser, the deserializer and
/// programmatic callers (generators, benchmarks).
#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<(NodeKind, Vec<usize>)>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, attribute: &str) -> usize {
        self.nodes.push((NodeKind::Leaf { attribute: attribute.to_string() }, Vec::new()));
        self.nodes.len() - 1
    }

    pub fn gate(&mut self, threshold: u16, children: Vec<usize>) -> usize {
        self.nodes.push((NodeKind::Gate { threshold }, children));
        self.nodes.len() - 1
    }

    pub fn build(self, root: usize) -> Result<AccessTree> {
        let mut nodes: Vec<Node> = self
            .nodes
            .into_iter()
            .map(|(kind, children)| Node { kind, children, parent: None, index: 0 })
            .collect();
        for id in 0..nodes.len() {
            let children = nodes[id].children.clone();
            for (i, child) in children.into_iter().enumerate() {
                if child >= nodes.len() {
                    return Err(Error::InvalidTree("child id out of range".into()));
                }
                if nodes[child].parent.is_some() {
                    return Err(Error::InvalidTree("node has two parents".into()));
                }
                nodes[child].parent = Some(id);
                nodes[child].index = (i + 1) as u16;
            }
        }
        let tree = AccessTree { nodes, root };
        tree.validate()?;
        Ok(tree)
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    input: &'a [u8],
    pos: usize,
}

fn is_attr_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'_' | b':' | b'.' | b'-')
}

impl<'a> Lexer<'a> {
    fn new(input: &'a [u8]) -> Self {
        Lexer { input, pos: 0 }
    }

    /// Next token plus the byte position where it starts.
    fn next(&mut self) -> Result<(Token, usize)> {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.input.len() {
            return Ok((Token::End, start));
        }
        let b = self.input[self.pos];
        match b {
            b'(' => {
                self.pos += 1;
                Ok((Token::LParen, start))
            }
            b')' => {
                self.pos += 1;
                Ok((Token::RParen, start))
            }
            b',' => {
                self.pos += 1;
                Ok((Token::Comma, start))
            }
            _ if is_attr_byte(b) => {
                while self.pos < self.input.len() && is_attr_byte(self.input[self.pos]) {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.input[start..self.pos])
                    .expect("attr bytes are ascii")
                    .to_string();
                Ok((Token::Word(word), start))
            }
            _ => Err(Error::PolicySyntax {
                position: start,
                message: format!("unexpected byte {:?}", b as char),
            }),
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    lookahead: (Token, usize),
    builder: TreeBuilder,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a [u8]) -> Result<Self> {
        let mut lexer = Lexer::new(input);
        let lookahead = lexer.next()?;
        Ok(Parser { lexer, lookahead, builder: TreeBuilder::new(), depth: 0 })
    }

    fn enter(&mut self, pos: usize) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_TREE_DEPTH {
            return Err(Error::PolicySyntax {
                position: pos,
                message: format!("nesting deeper than {MAX_TREE_DEPTH}"),
            });
        }
        Ok(())
    }

    fn advance(&mut self) -> Result<(Token, usize)> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.lookahead, next))
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<usize> {
        let (got, pos) = self.advance()?;
        if got == tok {
            Ok(pos)
        } else {
            Err(Error::PolicySyntax { position: pos, message: format!("expected {what}") })
        }
    }

    fn peek_word(&self) -> Option<&str> {
        match &self.lookahead.0 {
            Token::Word(w) => Some(w.as_str()),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<usize> {
        let first = self.term()?;
        let mut terms = vec![first];
        while self.peek_word() == Some("or") {
            self.advance()?;
            terms.push(self.term()?);
        }
        if terms.len() == 1 {
            Ok(terms.pop().expect("nonempty"))
        } else {
            Ok(self.builder.gate(1, terms))
        }
    }

    fn term(&mut self) -> Result<usize> {
        let first = self.factor()?;
        let mut factors = vec![first];
        while self.peek_word() == Some("and") {
            self.advance()?;
            factors.push(self.factor()?);
        }
        if factors.len() == 1 {
            Ok(factors.pop().expect("nonempty"))
        } else {
            let k = factors.len() as u16;
            Ok(self.builder.gate(k, factors))
        }
    }

    fn factor(&mut self) -> Result<usize> {
        let (tok, pos) = self.advance()?;
        match tok {
            Token::LParen => {
                self.enter(pos)?;
                let inner = self.expr()?;
                self.depth -= 1;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Token::Word(w) => {
                let is_int = !w.is_empty() && w.bytes().all(|b| b.is_ascii_digit());
                if is_int && self.peek_word() == Some("of") {
                    let k: u16 = w.parse().map_err(|_| Error::PolicySyntax {
                        position: pos,
                        message: format!("threshold {w} out of range"),
                    })?;
                    self.advance()?; // "of"
                    self.expect(Token::LParen, "'(' after 'of'")?;
                    self.enter(pos)?;
                    let mut children = vec![self.expr()?];
                    while self.lookahead.0 == Token::Comma {
                        self.advance()?;
                        children.push(self.expr()?);
                    }
                    self.depth -= 1;
                    self.expect(Token::RParen, "')' closing threshold list")?;
                    if k == 0 || k as usize > children.len() {
                        return Err(Error::PolicySyntax {
                            position: pos,
                            message: format!(
                                "threshold {k} outside 1..={}",
                                children.len()
                            ),
                        });
                    }
                    Ok(self.builder.gate(k, children))
                } else if w == "and" || w == "or" || w == "of" {
                    Err(Error::PolicySyntax {
                        position: pos,
                        message: format!("keyword {w:?} where an attribute was expected"),
                    })
                } else {
                    Ok(self.builder.leaf(&w))
                }
            }
            Token::End => Err(Error::PolicySyntax {
                position: pos,
                message: "unexpected end of policy".into(),
            }),
            other => Err(Error::PolicySyntax {
                position: pos,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }
}

/// Parse a textual policy into an access tree.
///
/// A bare attribute is wrapped as `1 of (leaf)` so the result always has a
/// gate root (n = 1, t = 1, k = 1 in the degenerate case).
pub fn parse_policy(text: &[u8]) -> Result<AccessTree> {
    let mut parser = Parser::new(text)?;
    let mut root = parser.expr()?;
    let (tok, pos) = parser.advance()?;
    if tok != Token::End {
        return Err(Error::PolicySyntax {
            position: pos,
            message: format!("trailing input starting with {tok:?}"),
        });
    }
    if matches!(parser.builder.nodes[root].0, NodeKind::Leaf { .. }) {
        root = parser.builder.gate(1, vec![root]);
    }
    parser.builder.build(root)
}

// ---------------------------------------------------------------------------
// Block partition
// ---------------------------------------------------------------------------

/// A leaf child of a sub-tree's interior node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafChild {
    pub node: NodeId,
    pub attribute: String,
    pub index: u16,
}

/// An interior (gate) child of a sub-tree's interior node, together with the
/// block that carries its own sub-tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteriorChild {
    pub node: NodeId,
    pub index: u16,
    pub block_index: usize,
}

/// One two-level sub-tree: an interior node plus its immediate children.
/// Block 1 holds the root; every interior node appears in exactly one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubTreePolicy {
    pub block_index: usize,
    pub interior_node: NodeId,
    pub leaf_children: Vec<LeafChild>,
    pub interior_children: Vec<InteriorChild>,
    pub parent_block: Option<usize>,
}

/// Partition the tree into per-interior-node blocks, breadth-first from the
/// root so every block's parent block precedes it. Deterministic.
pub fn enumerate_blocks(tree: &AccessTree) -> Result<Vec<SubTreePolicy>> {
    if !tree.node(tree.root()).is_gate() {
        return Err(Error::InvalidTree(
            "tree has no gate nodes; wrap the leaf as \"1 of (leaf)\"".into(),
        ));
    }
    // BFS pass one: block index per gate.
    let mut order: Vec<NodeId> = Vec::new();
    let mut block_of = vec![0usize; tree.len()];
    let mut queue = VecDeque::from([tree.root()]);
    while let Some(id) = queue.pop_front() {
        order.push(id);
        block_of[id] = order.len(); // 1-based
        for &child in &tree.node(id).children {
            if tree.node(child).is_gate() {
                queue.push_back(child);
            }
        }
    }
    // Pass two: materialize the sub-trees.
    let blocks = order
        .iter()
        .enumerate()
        .map(|(i, &gate)| {
            let node = tree.node(gate);
            let mut leaf_children = Vec::new();
            let mut interior_children = Vec::new();
            for &child in &node.children {
                let cn = tree.node(child);
                match cn.kind {
                    NodeKind::Leaf { ref attribute } => leaf_children.push(LeafChild {
                        node: child,
                        attribute: attribute.clone(),
                        index: cn.index,
                    }),
                    NodeKind::Gate { .. } => interior_children.push(InteriorChild {
                        node: child,
                        index: cn.index,
                        block_index: block_of[child],
                    }),
                }
            }
            SubTreePolicy {
                block_index: i + 1,
                interior_node: gate,
                leaf_children,
                interior_children,
                parent_block: node.parent.map(|p| block_of[p]),
            }
        })
        .collect();
    Ok(blocks)
}

// ---------------------------------------------------------------------------
// Canonical serialization
// ---------------------------------------------------------------------------

/// Canonical byte encoding of an access tree plus its self-authenticating
/// digest. The total length L_T = body ‖ digest is what every block id must
/// match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SerializedTree {
    pub body: Vec<u8>,
    pub digest: [u8; TREE_DIGEST_BYTES],
}

impl SerializedTree {
    /// body ‖ digest, the L_T bytes protected by the id sharing.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.body.clone();
        out.extend_from_slice(&self.digest);
        out
    }

    pub fn len(&self) -> usize {
        self.body.len() + TREE_DIGEST_BYTES
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Byte-identical output for structurally identical trees.
pub fn canonical_serialize(tree: &AccessTree) -> SerializedTree {
    let mut body = vec![TREE_FORMAT_VERSION];
    body.extend_from_slice(&(tree.len() as u32).to_be_bytes());
    // preorder, children in index order
    let mut stack = vec![tree.root()];
    while let Some(id) = stack.pop() {
        let node = tree.node(id);
        match node.kind {
            NodeKind::Gate { threshold } => {
                body.push(0x00);
                body.extend_from_slice(&threshold.to_be_bytes());
                body.extend_from_slice(&(node.children.len() as u16).to_be_bytes());
                body.extend_from_slice(&0u16.to_be_bytes()); // no attribute
                stack.extend(node.children.iter().rev().copied());
            }
            NodeKind::Leaf { ref attribute } => {
                body.push(0x01);
                body.extend_from_slice(&0u16.to_be_bytes());
                body.extend_from_slice(&0u16.to_be_bytes());
                body.extend_from_slice(&(attribute.len() as u16).to_be_bytes());
                body.extend_from_slice(attribute.as_bytes());
            }
        }
    }
    let digest: [u8; TREE_DIGEST_BYTES] = Sha256::digest(&body).into();
    SerializedTree { body, digest }
}

/// Inverse of [`canonical_serialize`] over body ‖ digest bytes. Rejects
/// digest mismatches and malformed bodies. Iterative, so adversarial inputs
/// cannot exhaust the call stack.
pub fn parse_serialized(bytes: &[u8]) -> Result<AccessTree> {
    if bytes.len() < 1 + 4 + TREE_DIGEST_BYTES {
        return Err(Error::Decode("serialized tree too short".into()));
    }
    let (body, digest) = bytes.split_at(bytes.len() - TREE_DIGEST_BYTES);
    let expected: [u8; TREE_DIGEST_BYTES] = Sha256::digest(body).into();
    if digest != expected {
        return Err(Error::Decode("serialized tree digest mismatch".into()));
    }
    if body[0] != TREE_FORMAT_VERSION {
        return Err(Error::Decode(format!("unknown tree format version {}", body[0])));
    }
    let count = u32::from_be_bytes(body[1..5].try_into().expect("4 bytes")) as usize;
    let mut cursor = 5usize;
    let mut builder = TreeBuilder::new();
    // (builder id, children still expected) for the current preorder spine
    let mut pending: Vec<(usize, u16, Vec<usize>)> = Vec::new();
    let mut root: Option<usize> = None;
    for _ in 0..count {
        if cursor + 7 > body.len() {
            return Err(Error::Decode("truncated node record".into()));
        }
        let kind = body[cursor];
        let threshold = u16::from_be_bytes(body[cursor + 1..cursor + 3].try_into().unwrap());
        let child_count = u16::from_be_bytes(body[cursor + 3..cursor + 5].try_into().unwrap());
        let attr_len =
            u16::from_be_bytes(body[cursor + 5..cursor + 7].try_into().unwrap()) as usize;
        cursor += 7;
        if cursor + attr_len > body.len() {
            return Err(Error::Decode("truncated attribute".into()));
        }
        let attr_bytes = &body[cursor..cursor + attr_len];
        cursor += attr_len;
        let id = match kind {
            0x00 => {
                if attr_len != 0 {
                    return Err(Error::Decode("gate record with attribute bytes".into()));
                }
                builder.gate(threshold, Vec::new())
            }
            0x01 => {
                if threshold != 0 || child_count != 0 {
                    return Err(Error::Decode("leaf record with gate fields".into()));
                }
                let attribute = std::str::from_utf8(attr_bytes)
                    .map_err(|_| Error::Decode("attribute is not utf-8".into()))?;
                builder.leaf(attribute)
            }
            other => return Err(Error::Decode(format!("unknown node kind {other}"))),
        };
        match pending.last_mut() {
            Some((_, remaining, children)) => {
                children.push(id);
                *remaining -= 1;
            }
            None => {
                if root.is_some() {
                    return Err(Error::Decode("multiple roots in serialized tree".into()));
                }
                root = Some(id);
            }
        }
        if kind == 0x00 {
            if child_count == 0 {
                return Err(Error::Decode("gate with no children".into()));
            }
            pending.push((id, child_count, Vec::new()));
            if pending.len() > MAX_TREE_DEPTH {
                return Err(Error::Decode(format!(
                    "tree nesting deeper than {MAX_TREE_DEPTH}"
                )));
            }
        }
        while let Some((gate, 0, _)) = pending.last() {
            let gate = *gate;
            let (_, _, children) = pending.pop().expect("nonempty");
            builder.nodes[gate].1 = children;
        }
    }
    if !pending.is_empty() {
        return Err(Error::Decode("serialized tree ended mid-gate".into()));
    }
    if cursor != body.len() {
        return Err(Error::Decode("trailing bytes after node records".into()));
    }
    let root = root.ok_or_else(|| Error::Decode("serialized tree has no nodes".into()))?;
    let tree = builder.build(root)?;
    Ok(tree)
}

// ---------------------------------------------------------------------------
// Root-branch partition and satisfaction
// ---------------------------------------------------------------------------

/// Split all attributes into t disjoint sets, one per root branch.
///
/// An attribute appearing under several branches is assigned to the
/// lowest-index branch containing it, so the sets stay disjoint at the cost
/// of the pre-filter under-counting such policies.
pub fn root_branch_partition(tree: &AccessTree) -> Vec<BTreeSet<String>> {
    let root = tree.node(tree.root());
    debug_assert!(root.is_gate(), "validated trees used for encryption have gate roots");
    let mut claimed: BTreeSet<String> = BTreeSet::new();
    root.children
        .iter()
        .map(|&branch| {
            let mut set = BTreeSet::new();
            for leaf in tree.leaves_below(branch) {
                let attr = tree.node(leaf).attribute().expect("leaves carry attributes");
                if claimed.insert(attr.to_string()) {
                    set.insert(attr.to_string());
                }
            }
            set
        })
        .collect()
}

/// Recursive threshold evaluation: does `attrs` satisfy the tree?
pub fn satisfies(tree: &AccessTree, attrs: &BTreeSet<String>) -> bool {
    satisfies_at(tree, tree.root(), attrs)
}

/// Satisfaction of the subtree rooted at `id`.
pub fn satisfies_at(tree: &AccessTree, id: NodeId, attrs: &BTreeSet<String>) -> bool {
    let node = tree.node(id);
    match node.kind {
        NodeKind::Leaf { ref attribute } => attrs.contains(attribute),
        NodeKind::Gate { threshold } => {
            let mut hit = 0usize;
            for &child in &node.children {
                if satisfies_at(tree, child, attrs) {
                    hit += 1;
                    if hit >= threshold as usize {
                        return true;
                    }
                }
            }
            false
        }
    }
}

// ---------------------------------------------------------------------------
// Synthetic trees (benchmarks, generators)
// ---------------------------------------------------------------------------

pub mod synth {
    //! Deterministic and random tree shapes for benchmarks and tests.

    use rand::Rng;

    use super::{AccessTree, TreeBuilder};

    /// A chain of `gates` nested gates (depth = gate count) carrying `leaves`
    /// distinct attribute leaves spread evenly along the spine. AND gates.
    pub fn chain_tree(gates: u32, leaves: u32) -> AccessTree {
        assert!(gates >= 1, "need at least one gate");
        assert!(leaves >= 1, "need at least one leaf");
        let mut b = TreeBuilder::new();
        let mut leaf_no = 0u32;
        let mut take = |b: &mut TreeBuilder, want: u32| -> Vec<usize> {
            (0..want)
                .map(|_| {
                    let id = b.leaf(&format!("attr{leaf_no:04}"));
                    leaf_no += 1;
                    id
                })
                .collect()
        };
        let per_gate = leaves / gates;
        let mut extra = leaves % gates;
        // build bottom-up so each gate can hold the next deeper gate
        let mut lower: Option<usize> = None;
        for depth in (0..gates).rev() {
            let mut want = per_gate + u32::from(extra > 0);
            extra = extra.saturating_sub(1);
            if lower.is_none() && want == 0 {
                want = 1; // deepest gate must own a leaf
            }
            let mut children = take(&mut b, want);
            if let Some(inner) = lower {
                children.push(inner);
            }
            let k = children.len() as u16;
            lower = Some(b.gate(k, children));
            let _ = depth;
        }
        b.build(lower.expect("at least one gate")).expect("synthetic chain tree is valid")
    }

    /// A two-level gate arrangement: the root gate fans out to `gates - 1`
    /// child gates, leaves spread evenly. AND gates.
    pub fn star_tree(gates: u32, leaves: u32) -> AccessTree {
        assert!(gates >= 1);
        assert!(leaves >= gates.saturating_sub(1).max(1), "every child gate needs a leaf");
        let mut b = TreeBuilder::new();
        let mut leaf_no = 0u32;
        let mut next_leaf = |b: &mut TreeBuilder| {
            let id = b.leaf(&format!("attr{leaf_no:04}"));
            leaf_no += 1;
            id
        };
        if gates == 1 {
            let children: Vec<_> = (0..leaves).map(|_| next_leaf(&mut b)).collect();
            let k = children.len() as u16;
            let root = b.gate(k, children);
            return b.build(root).expect("synthetic star tree is valid");
        }
        let fan = gates - 1;
        let per = leaves / fan;
        let mut extra = leaves % fan;
        let mut branches = Vec::new();
        for _ in 0..fan {
            let want = per + u32::from(extra > 0);
            extra = extra.saturating_sub(1);
            let children: Vec<_> = (0..want.max(1)).map(|_| next_leaf(&mut b)).collect();
            let k = children.len() as u16;
            branches.push(b.gate(k, children));
        }
        let k = branches.len() as u16;
        let root = b.gate(k, branches);
        b.build(root).expect("synthetic star tree is valid")
    }

    /// Random tree with at most `max_gates` gates and `max_leaves` leaves.
    /// Attributes are globally distinct (`a0`, `a1`, …), thresholds random.
    pub fn random_tree<R: Rng>(rng: &mut R, max_gates: u32, max_leaves: u32) -> AccessTree {
        let gates = rng.gen_range(1..=max_gates.max(1));
        let leaves = rng.gen_range(gates.max(1)..=max_leaves.max(gates).max(1));
        let mut b = TreeBuilder::new();
        // start with the leaf pool, then repeatedly group nodes under gates
        let mut pool: Vec<usize> = (0..leaves).map(|i| b.leaf(&format!("a{i}"))).collect();
        let mut gates_left = gates;
        while gates_left > 0 {
            let group = if gates_left == 1 {
                pool.len() // final gate becomes the root over everything left
            } else {
                let max_take = pool.len() - (gates_left as usize - 1);
                rng.gen_range(1..=max_take.max(1))
            };
            let mut children = Vec::with_capacity(group);
            for _ in 0..group {
                let pick = rng.gen_range(0..pool.len());
                children.push(pool.swap_remove(pick));
            }
            let k = rng.gen_range(1..=children.len()) as u16;
            pool.push(b.gate(k, children));
            gates_left -= 1;
        }
        debug_assert_eq!(pool.len(), 1);
        let root = pool.pop().expect("single root remains");
        b.build(root).expect("random tree is valid")
    }
}
