use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixedPointError {
    #[error("leading-one position of zero is undefined")]
    ZeroInput,
    #[error("value {0} is not representable")]
    OutOfRange(f64),
    #[error("malformed binary literal {0:?}")]
    BadBinaryLiteral(String),
    #[error("binary literal {literal:?} has more than {frac} fractional digits")]
    TooManyFractionDigits { literal: String, frac: u8 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DictError {
    #[error("word list is empty")]
    EmptyWordList,
    #[error("empty word at line {0}")]
    EmptyWord(usize),
    #[error("word {word:?} contains {ch:?}, which is not a dictionary character")]
    InvalidChar { word: String, ch: char },
    #[error("relative right-sibling distance {distance} at node {node} does not fit {rel_bits} bits")]
    RelativeAddressOverflow { node: usize, distance: usize, rel_bits: u8 },
    #[error("{node_count} nodes exceed the {addr_bits}-bit address space")]
    AddressSpaceExceeded { node_count: usize, addr_bits: u8 },
    #[error("malformed dictionary blob: {0}")]
    MalformedBlob(String),
    #[error("invalid dictionary pointer {0}")]
    InvalidPointer(u32),
    #[error("unsupported field widths: {0}")]
    BadWidths(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("alphabet needs at least one word character and the separator")]
    TooSmall,
    #[error("duplicate label {0:?}")]
    Duplicate(char),
    #[error("label {0:?} must be a single printable character")]
    BadLabel(String),
    #[error("separator '_' must be the last label")]
    SeparatorNotLast,
    #[error("alphabet has {0} labels, more than the supported 255")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("every beam probability reached zero at step {step}; raise q or enable adjustment")]
    BeamCollapse { step: usize },
    #[error("no frames to decode")]
    NoFrames,
    #[error("frame {step} has {got} probabilities, expected {expected}")]
    FrameWidth { step: usize, got: usize, expected: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("sequence of {got} frames exceeds t_max = {max}")]
    TooLong { got: usize, max: usize },
    #[error(transparent)]
    Dict(#[from] DictError),
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed logits file: {0}")]
    MalformedLogits(String),
    #[error("bad config: {0}")]
    Config(String),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Dict(#[from] DictError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{paths} paths exceed the enumeration limit of {limit}")]
    InstanceTooLarge { paths: u128, limit: u128 },
    #[error("no frames")]
    NoFrames,
    #[error("frames have inconsistent widths")]
    Ragged,
}
