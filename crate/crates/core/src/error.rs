use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { what: String, deviation: f64 },

    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid sector: {0}")]
    InvalidSector(String),

    #[error("invalid factor token at term {term}, factor {factor} (`{token}`, column {column}): {reason}")]
    InvalidToken {
        term: usize,
        factor: usize,
        token: String,
        column: usize,
        reason: String,
    },

    #[error("invalid Hamiltonian specification: {0}")]
    InvalidSpec(String),

    #[error("sector-violating operator: {0}")]
    SectorViolation(String),

    #[error("family {family} does not act on sector {sector}")]
    FamilyMismatch { family: String, sector: String },

    #[error("invalid single-particle generator: {0}")]
    InvalidGenerator(String),

    #[error("not a normalizer: {0}")]
    NotANormalizer(String),

    #[error("no invariant vector: {0}")]
    NoInvariantVector(String),

    #[error("refusing to build {what}: {reason}")]
    MemoryGuard { what: String, reason: String },

    #[error("numerically ambiguous {quantity}: {value:.3e} lies between {zero_below:.3e} and {nonzero_above:.3e}")]
    NumericallyAmbiguous {
        quantity: String,
        value: f64,
        zero_below: f64,
        nonzero_above: f64,
    },

    #[error("oracle inconclusive: closure did not converge within {rounds} rounds (dim {dim})")]
    OracleInconclusive { rounds: usize, dim: usize },

    #[error("oracle out of scope: sector dimension {dim} exceeds {limit}")]
    OracleScope { dim: usize, limit: usize },

    #[error("oracle disagrees with classifier: {0}")]
    OracleMismatch(String),

    #[error("linear solve failed: {0}")]
    Solve(String),
}
