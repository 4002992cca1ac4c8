use thiserror::Error;

/// Errors raised by the analyses in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("non-finite entry in matrix")]
    NonFinite,
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("state of {qubits} qubits exceeds the configured maximum of {max}")]
    StateTooLarge { qubits: usize, max: usize },
    #[error("qubit index {index} out of range for {count} qubits")]
    QubitOutOfRange { index: usize, count: usize },
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid quantum state: {0}")]
    InvalidState(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("norm drifted to {norm} after gate application")]
    NormDrift { norm: f64 },
    #[error("{what} count {count} exceeds the configured cap of {cap}")]
    CapExceeded { what: &'static str, count: usize, cap: usize },
    #[error("linear program failed: {0}")]
    Solver(String),
    #[error("wrong distribution support: {0}")]
    WrongSupport(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerics themselves rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::NormDrift { .. } | Error::Solver(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
