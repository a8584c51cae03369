use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("not normalized: {0}")]
    NotNormalized(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("cyclic factor wiring")]
    CyclicWiring,
    #[error("invalid wiring: {0}")]
    InvalidWiring(String),
    #[error("axis subsets overlap")]
    OverlappingAxes,
    #[error("empty axis subset")]
    EmptyAxes,
    #[error("axis {0} out of range")]
    AxisOutOfRange(usize),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("symbol out of range: {0}")]
    SymbolOutOfRange(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("partial deterministic table: {0}")]
    PartialTable(String),
    #[error("kind mismatch: expected {expected}, found {found}")]
    KindMismatch { expected: String, found: String },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("auxiliary alphabet size {size} exceeds cardinality cap {cap}")]
    CardinalityCap { size: usize, cap: usize },
    #[error("pairing mismatch: {0}")]
    PairingMismatch(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error comes from a resource cap rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}
