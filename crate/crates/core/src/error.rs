use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("qubit {qubit} appears more than once in a Pauli string")]
    RepeatedQubit { qubit: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("variable {var} out of range for {n_vars} variables")]
    VariableOutOfRange { var: usize, n_vars: usize },

    #[error("variable {var} assigned twice")]
    DoubleAssignment { var: usize },

    #[error("spin value {0} is not +1 or -1")]
    InvalidSpin(i64),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("assignment length {0} is odd; product states need two variables per qubit")]
    OddAssignment(usize),

    #[error("polynomial is already constant")]
    AlreadyConstant,

    #[error("{what}: n = {n} exceeds limit {limit}")]
    TooLarge { what: &'static str, n: usize, limit: usize },

    #[error("Hamiltonian contains a non-diagonal term ({0})")]
    NotDiagonal(String),

    #[error("eigensolver did not converge after {iterations} matrix-vector products (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid instance parameters: {0}")]
    InvalidInstance(String),

    #[error("generator gave up after {0} attempts")]
    RetriesExhausted(usize),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
