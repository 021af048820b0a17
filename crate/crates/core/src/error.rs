use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // field
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order must be at least 2, got {0}")]
    TooSmall(u64),
    #[error("field order {0} exceeds the supported maximum 2^31-1")]
    ModulusTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element of F_{found} used with F_{expected}")]
    FieldMismatch { expected: u32, found: u32 },

    // projective space
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("PG({dim},{q}) has too many points to index")]
    SpaceTooLarge { dim: usize, q: u64 },
    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("point index {index} outside 1..={count}")]
    IndexOutOfRange { index: u64, count: u64 },
    #[error("coordinates are not normalized (leftmost nonzero entry must be 1)")]
    NotNormalized,
    #[error("expected {expected} coordinates, got {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("coordinate {value} is not a residue modulo {q}")]
    CoordinateOutOfRange { value: u64, q: u32 },
    #[error("a line needs two distinct points")]
    SamePoint,
    #[error("points must be pairwise distinct")]
    DuplicatePoints,

    // coverage engine
    #[error("allocation of {requested} bytes exceeds the memory budget of {budget} bytes")]
    AllocationFailure { requested: u64, budget: u64 },
    #[error("point {0} lies on a bisecant of the cap")]
    PointCovered(u64),
    #[error("point {0} is already in the cap")]
    DuplicatePoint(u64),
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("inconsistent header: {0}")]
    InconsistentHeader(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("invalid point order: {0}")]
    InvalidOrder(String),

    // greedy search
    #[error("no uncovered points left")]
    NoCandidates,
    #[error("starting set is not a cap")]
    S0NotACap,
    #[error("no attempts were run")]
    EmptyRun,
    #[error("invalid greedy parameters: {0}")]
    InvalidParams(String),
    #[error("config line {line}: {message}")]
    ConfigError { line: usize, message: String },

    // bounds
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("records disagree on (N, q)")]
    MismatchedRecords,

    // codes
    #[error("parity-check matrix needs at least one column")]
    EmptyCap,
    #[error("computation too large: {0}")]
    TooLarge(String),

    // reference tables
    #[error("reference data corrupt: {0}")]
    DataCorrupt(String),
    #[error("q = {0} is not in the reference table")]
    UnknownQ(u64),
    #[error("no reference table for N = {0}")]
    UnknownTable(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
