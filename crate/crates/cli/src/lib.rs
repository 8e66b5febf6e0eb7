//! Library side of the `unikit` binary: scenario files, matrix files,
//! report records and the canned example runs.

pub mod matrix_file;
pub mod repro;
pub mod report;
pub mod scenario;

use std::path::PathBuf;

pub use report::SCHEMA;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("{0}")]
    Core(#[from] unikit_core::Error),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    /// Process exit status: 1 for reproduction mismatches, 2 for invalid
    /// input, 3 for a non-Hermitian Hamiltonian, 4 for numerical ambiguity
    /// or an inconclusive oracle.
    pub fn exit_code(&self) -> i32 {
        use unikit_core::Error as E;
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Io { .. } | CliError::Scenario(_) => 2,
            CliError::Core(E::NotHermitian { .. }) => 3,
            CliError::Core(E::NumericallyAmbiguous { .. } | E::OracleInconclusive { .. } | E::OracleMismatch(_)) => 4,
            CliError::Core(_) => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
