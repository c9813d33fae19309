//! Block-partitioned, pipelined ciphertext-policy attribute-based encryption.
//!
//! A message and its threshold access tree are split per interior node into
//! blocks that are encrypted, transmitted and decrypted in overlapping
//! stages. A dual secret-sharing layer hides the access policy inside the
//! block ids, pre-filters requesters whose attributes cannot reach the root
//! threshold, and detects missing or corrupted blocks before any pairing
//! work is spent.
//!
//! Start with the runnable programs under `examples/`:
//!
//! * `setup_keygen` — key ceremony and key-file round trips
//! * `policy_trees` — the policy grammar, block partition and satisfaction
//! * `encrypt_decrypt` — end-to-end file encryption with a satisfying key
//! * `attribute_filter` — the attribute pre-filter and integrity check
//! * `dual_path` — ABE-path vs parent-chained SYM-path block decryption
//! * `pipeline_trace` — overlapped encrypt→transmit scheduling on a model channel
//! * `bench_sweep` — CSV benchmark sweeps against the monolithic baseline

pub mod abe;
pub mod chunker;
pub mod cli;
pub mod container;
pub mod dem;
pub mod error;
pub mod pairing;
pub mod pipeline;
pub mod policy;
pub mod sharing;

pub use error::{Error, Refusal, RefusalStage, Result};
