use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown letter {0:?}")]
    UnknownLetter(char),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error(
        "relators violate C'(1/6): piece of length {piece} in relator of length {relator_len}"
    )]
    NotC16 { piece: usize, relator_len: usize },
    #[error("operation requires a small-cancellation oracle")]
    NotSmallCancellation,
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("not a path: {0}")]
    NotAPath(String),
    #[error("not geodesic: {0}")]
    NotGeodesic(String),
    #[error("replacement is not a geodesic between the segment endpoints: {0}")]
    NotGeodesicReplacement(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("substitution produced a non-geodesic word: {0}")]
    SubstitutionViolation(String),
    #[error("empty target set")]
    EmptyTargetSet,
    #[error("sequence models use different alphabets")]
    AlphabetMismatch,
    #[error("truncated overlap {overlap} is below the minimum window {min}")]
    WindowTooSmall { overlap: usize, min: usize },
    #[error("carrier is not closed under the shift: {0}")]
    NotShiftClosed(String),
    #[error("invalid sequence model: {0}")]
    InvalidModel(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
