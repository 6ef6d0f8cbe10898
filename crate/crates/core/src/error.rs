use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed code word: {0}")]
    MalformedCode(String),
    #[error("buffer ends inside a code word")]
    Truncated,

    #[error("auxiliary string was not probed when the snapshot was built")]
    AuxiliaryNotProbed,
    #[error("quantity is undefined: {0}")]
    Undefined(String),
    #[error("string {0} is not total")]
    NotTotal(String),
    #[error("no halting program outputs the requested string")]
    NoShortestProgram,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not exactly unitary")]
    NotUnitary,
    #[error("state is not normalized within tolerance")]
    NotNormalized,
    #[error("weights sum to more than one")]
    WeightOverflow,
    #[error("matrix is not a semi-density matrix: {0}")]
    NotSemiDensity(String),

    #[error("catalog has no entries for this query")]
    EmptyCatalog,
    #[error("catalog is not closed under the adjoint transform")]
    CatalogNotClosed,

    #[error("program output is not a circuit encoding")]
    DecodeFailure,
    #[error("no strategy with finite cost")]
    NoValidStrategy,

    #[error("measure assigns zero mass to the point")]
    ZeroMass,
    #[error("no program in the snapshot outputs a measure containing the point")]
    NoMeasureFound,
    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),
    #[error("search finished without a result: {0}")]
    NotFound(String),

    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
