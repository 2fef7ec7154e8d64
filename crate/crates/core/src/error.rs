use thiserror::Error;

use crate::id::Id;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("identifier width must be between 3 and 63 bits, got {0}")]
    InvalidBits(u32),
    #[error("cannot hash an empty label")]
    EmptyLabel,
    #[error("value {value} does not fit in a {bits}-bit identifier space")]
    IdOutOfRange { value: u64, bits: u32 },
    #[error("finger index {index} outside 1..={bits}")]
    FingerIndex { index: u32, bits: u32 },
    #[error("ring needs at least one node")]
    EmptyRing,
    #[error("duplicate node id {0}")]
    DuplicateId(Id),
    #[error("node {0} is not active")]
    UnknownNode(Id),
    #[error("node id {0} is already active")]
    IdCollision(Id),
    #[error("node {0} is the last one on the ring and cannot leave")]
    LastNode(Id),
    #[error("all nodes are resourceless")]
    AllResourceless,
    #[error("fraction {0} outside [0, 1]")]
    FractionOutOfRange(f64),
    #[error("internal consistency error: {0}")]
    Inconsistent(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
