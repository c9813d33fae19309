//! Error and refusal types shared across the crate.
//!
//! A [`Refusal`] is the typed ⊥ outcome of the decryption subroutines: the
//! requester was turned away at a well-defined stage. Everything else is an
//! [`Error`].

use std::fmt;

use thiserror::Error;

/// The decryption stage at which a request was refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefusalStage {
    /// The attribute pre-filter could not recover the final id share.
    AttCheck,
    /// The XOR of all block ids did not reassemble a valid access tree.
    Integrity,
    /// Neither decryption path could open the given block.
    Block(u32),
    /// Recovered blocks did not reassemble into a message.
    Reassembly,
}

impl fmt::Display for RefusalStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RefusalStage::AttCheck => write!(f, "att_check"),
            RefusalStage::Integrity => write!(f, "integrity"),
            RefusalStage::Block(i) => write!(f, "block {i}"),
            RefusalStage::Reassembly => write!(f, "reassembly"),
        }
    }
}

/// A typed refusal: decryption stopped at `stage`, with a human-readable reason.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("refused at stage {stage}: {reason}")]
pub struct Refusal {
    pub stage: RefusalStage,
    pub reason: String,
}

impl Refusal {
    pub fn new(stage: RefusalStage, reason: impl Into<String>) -> Self {
        Refusal { stage, reason: reason.into() }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("policy syntax error at byte {position}: {message}")]
    PolicySyntax { position: usize, message: String },

    #[error("invalid access tree: {0}")]
    InvalidTree(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("inverse of zero is undefined")]
    InverseOfZero,

    #[error("interpolation set contains a repeated point")]
    RepeatedPoint,

    #[error("insufficient shares: have {have}, need {need}")]
    InsufficientShares { have: usize, need: usize },

    #[error("invalid threshold: k={k}, t={t}")]
    InvalidThreshold { k: u16, t: u16 },

    #[error("point-table key collision between attributes {0:?} and {1:?}")]
    TableKeyCollision(String, String),

    #[error("share length mismatch")]
    ShareLengthMismatch,

    #[error("block length mismatch")]
    BlockLengthMismatch,

    #[error("missing block {0}")]
    MissingBlock(u32),

    #[error("attribute set is empty")]
    EmptyAttributeSet,

    #[error("public-parameter digest mismatch")]
    ParamsMismatch,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Refused(#[from] Refusal),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Convenience constructor used throughout the decryption path.
    pub fn refused(stage: RefusalStage, reason: impl Into<String>) -> Self {
        Error::Refused(Refusal::new(stage, reason))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
