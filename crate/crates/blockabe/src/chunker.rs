//! Message partitioning and XOR block chaining.
//!
//! The message is framed (8-byte big-endian length, version byte), zero-padded
//! to n equal blocks, and chained: DB_1 = M_1, DB_i = M_{i−1} ⊕ M_i. A chained
//! block by itself yields only the difference M_{i−1} ⊕ M_i; recovering any
//! plaintext prefix requires every block from 1 up, which is why [`unchain`]
//! refuses incomplete sets instead of emitting partial output.

use crate::error::{Error, Result};

pub const CHUNK_FORMAT_VERSION: u8 = 0x01;
const HEADER_BYTES: usize = 9;

/// One plaintext block M_i of the uniform width B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainBlock {
    /// 1-based block index.
    pub index: u32,
    pub bytes: Vec<u8>,
}

/// One chained block DB_i of the uniform width B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainedBlock {
    pub index: u32,
    pub bytes: Vec<u8>,
}

/// Uniform block width for a message of `len` bytes split n ways.
pub fn block_width(len: usize, n: usize) -> usize {
    (len + HEADER_BYTES).div_ceil(n)
}

/// Frame, pad and cut the message into n equal blocks. Deterministic; empty
/// messages are fine.
pub fn partition(message: &[u8], n: usize) -> Vec<PlainBlock> {
    assert!(n >= 1, "partition needs at least one block");
    let width = block_width(message.len(), n);
    let mut framed = Vec::with_capacity(n * width);
    framed.extend_from_slice(&(message.len() as u64).to_be_bytes());
    framed.push(CHUNK_FORMAT_VERSION);
    framed.extend_from_slice(message);
    framed.resize(n * width, 0);
    framed
        .chunks(width)
        .enumerate()
        .map(|(i, chunk)| PlainBlock { index: (i + 1) as u32, bytes: chunk.to_vec() })
        .collect()
}

fn xor_bytes(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

fn check_uniform(lens: impl Iterator<Item = usize>) -> Result<()> {
    let mut lens = lens.peekable();
    let first = *lens.peek().ok_or(Error::BlockLengthMismatch)?;
    if lens.all(|l| l == first) {
        Ok(())
    } else {
        Err(Error::BlockLengthMismatch)
    }
}

/// DB_1 = M_1, DB_i = M_{i−1} ⊕ M_i.
pub fn chain(blocks: &[PlainBlock]) -> Result<Vec<ChainedBlock>> {
    check_uniform(blocks.iter().map(|b| b.bytes.len()))?;
    Ok(blocks
        .iter()
        .enumerate()
        .map(|(i, b)| ChainedBlock {
            index: b.index,
            bytes: if i == 0 { b.bytes.clone() } else { xor_bytes(&blocks[i - 1].bytes, &b.bytes) },
        })
        .collect())
}

/// Invert the chain: M_1 = DB_1, M_i = DB_i ⊕ M_{i−1}. Blocks may arrive out
/// of order; every index 1..=n must be present.
pub fn unchain(blocks: &[ChainedBlock]) -> Result<Vec<PlainBlock>> {
    let mut sorted: Vec<&ChainedBlock> = blocks.iter().collect();
    sorted.sort_by_key(|b| b.index);
    for (i, b) in sorted.iter().enumerate() {
        if b.index as usize != i + 1 {
            return Err(Error::MissingBlock((i + 1) as u32));
        }
    }
    check_uniform(sorted.iter().map(|b| b.bytes.len()))?;
    let mut out: Vec<PlainBlock> = Vec::with_capacity(sorted.len());
    for b in sorted {
        let bytes = match out.last() {
            None => b.bytes.clone(),
            Some(prev) => xor_bytes(&prev.bytes, &b.bytes),
        };
        out.push(PlainBlock { index: b.index, bytes });
    }
    Ok(out)
}

/// Concatenate, strip the frame and recover the original message.
pub fn reassemble(blocks: &[PlainBlock]) -> Result<Vec<u8>> {
    let mut sorted: Vec<&PlainBlock> = blocks.iter().collect();
    sorted.sort_by_key(|b| b.index);
    for (i, b) in sorted.iter().enumerate() {
        if b.index as usize != i + 1 {
            return Err(Error::MissingBlock((i + 1) as u32));
        }
    }
    check_uniform(sorted.iter().map(|b| b.bytes.len()))?;
    let mut framed = Vec::new();
    for b in sorted {
        framed.extend_from_slice(&b.bytes);
    }
    if framed.len() < HEADER_BYTES {
        return Err(Error::Decode("reassembled payload shorter than its header".into()));
    }
    let len = u64::from_be_bytes(framed[..8].try_into().expect("8 bytes")) as usize;
    if framed[8] != CHUNK_FORMAT_VERSION {
        return Err(Error::Decode(format!("unknown chunk format version {}", framed[8])));
    }
    if len > framed.len() - HEADER_BYTES {
        return Err(Error::Decode("encoded length exceeds available bytes".into()));
    }
    framed.drain(..HEADER_BYTES);
    framed.truncate(len);
    Ok(framed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn partition_single_block() {
        let blocks = partition(b"abcd", 1);
        assert_eq!(blocks.len(), 1);
        let b = &blocks[0];
        assert_eq!(&b.bytes[..8], &4u64.to_be_bytes());
        assert_eq!(b.bytes[8], CHUNK_FORMAT_VERSION);
        assert_eq!(&b.bytes[9..], b"abcd");
    }

    #[test]
    fn partition_width_formula() {
        let blocks = partition(&[0xAB; 100], 4);
        assert_eq!(blocks.len(), 4);
        let width = (100 + 9usize).div_ceil(4);
        assert_eq!(width, 28);
        assert!(blocks.iter().all(|b| b.bytes.len() == width));
        assert!(4 * width >= 109);
    }

    #[test]
    fn chain_example() {
        let blocks = vec![
            PlainBlock { index: 1, bytes: vec![0x61, 0x62] },
            PlainBlock { index: 2, bytes: vec![0x63, 0x64] },
        ];
        let chained = chain(&blocks).unwrap();
        assert_eq!(chained[0].bytes, vec![0x61, 0x62]);
        assert_eq!(chained[1].bytes, vec![0x02, 0x06]);
        let back = unchain(&chained).unwrap();
        assert_eq!(back, blocks);
    }

    #[test]
    fn chain_all_equal_blocks_zero_out() {
        let blocks: Vec<PlainBlock> =
            (1..=4).map(|i| PlainBlock { index: i, bytes: vec![0x55; 8] }).collect();
        let chained = chain(&blocks).unwrap();
        assert_eq!(chained[0].bytes, vec![0x55; 8]);
        for c in &chained[1..] {
            assert!(c.bytes.iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn chain_rejects_length_mismatch() {
        let blocks = vec![
            PlainBlock { index: 1, bytes: vec![1, 2] },
            PlainBlock { index: 2, bytes: vec![3] },
        ];
        assert!(matches!(chain(&blocks), Err(Error::BlockLengthMismatch)));
    }

    #[test]
    fn unchain_out_of_order_is_sorted() {
        let blocks = partition(b"hello chained world", 3);
        let chained = chain(&blocks).unwrap();
        let mut shuffled = chained.clone();
        shuffled.reverse();
        assert_eq!(unchain(&shuffled).unwrap(), blocks);
    }

    #[test]
    fn unchain_refuses_missing_first_block() {
        let blocks = partition(&[7u8; 64], 4);
        let chained = chain(&blocks).unwrap();
        // without DB_1 nothing can be recovered; refusing is the contract
        assert!(matches!(unchain(&chained[1..]), Err(Error::MissingBlock(1))));
        // an interior gap is equally fatal
        let gappy = [&chained[..1], &chained[2..]].concat();
        assert!(matches!(unchain(&gappy), Err(Error::MissingBlock(2))));
    }

    #[test]
    fn reassemble_rejects_bad_header() {
        let blocks = partition(b"a payload long enough for the header", 2);
        let mut tampered = blocks.clone();
        tampered[0].bytes[..8].copy_from_slice(&u64::MAX.to_be_bytes());
        assert!(reassemble(&tampered).is_err());
        let mut wrong_version = blocks;
        wrong_version[0].bytes[8] = 0x7F;
        assert!(reassemble(&wrong_version).is_err());
    }

    #[test]
    fn empty_message_round_trips() {
        let blocks = partition(b"", 3);
        assert_eq!(blocks.len(), 3);
        assert_eq!(reassemble(&blocks).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn full_round_trip_large_random() {
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for &len in &[0usize, 1, 9, 1000, 1 << 20] {
            let mut msg = vec![0u8; len];
            rng.fill_bytes(&mut msg);
            for n in [1usize, 2, 7, 32] {
                let back =
                    reassemble(&unchain(&chain(&partition(&msg, n)).unwrap()).unwrap()).unwrap();
                assert_eq!(back, msg, "len={len} n={n}");
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(msg in proptest::collection::vec(any::<u8>(), 0..4096), n in 1usize..32) {
            let blocks = partition(&msg, n);
            prop_assert_eq!(blocks.len(), n);
            let chained = chain(&blocks).unwrap();
            let back = reassemble(&unchain(&chained).unwrap()).unwrap();
            prop_assert_eq!(back, msg);
        }
    }
}
