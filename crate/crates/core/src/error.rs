//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate targets must be distinct: {0:?}")]
    DuplicateTargets(Vec<usize>),

    #[error("gate {name} expects {expected} target(s), got {got}")]
    BadArity {
        name: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix is {rows}x{cols}, expected {dim}x{dim}")]
    BadMatrixShape { rows: usize, cols: usize, dim: usize },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semi-definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemiDefinite { min_eigenvalue: f64 },

    #[error("operator norm {norm} exceeds 1")]
    NormExceedsOne { norm: f64 },

    #[error("state vector has {got} amplitudes, expected {expected}")]
    BadStateLength { got: usize, expected: usize },

    #[error("state vector is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("input bit string {bits:?} has {got} bits but the circuit has only {qubits} qubits")]
    BadInputBits {
        bits: String,
        got: usize,
        qubits: usize,
    },

    #[error("circuit must contain at least one gate")]
    EmptyCircuit,

    #[error("thresholds require b > a, got a = {a}, b = {b}")]
    BadThresholds { a: f64, b: f64 },

    #[error("dense representation refused: dimension {dim} exceeds cap {cap}")]
    DenseDimensionCap { dim: usize, cap: usize },

    #[error("expectation value has imaginary residue {imag:.3e}; operator is not Hermitian")]
    ImaginaryExpectation { imag: f64 },

    #[error("clause {clause:?} is tautological; it has no unsatisfying assignment")]
    TautologicalClause { clause: Vec<i32> },

    #[error("clause {clause:?} has {got} literals; only 1..=3 are supported")]
    BadClauseWidth { clause: Vec<i32>, got: usize },

    #[error("literal {literal} references a variable outside 1..={n_vars}")]
    LiteralOutOfRange { literal: i32, n_vars: usize },

    #[error("DIMACS parse error: {0}")]
    Dimacs(String),

    #[error("file format error: {0}")]
    Format(String),

    #[error("Hamiltonian has no terms")]
    EmptySpec,

    #[error("subspace basis is empty")]
    EmptySubspace,

    #[error("basis columns are not orthonormal (max Gram deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("amplification needs c > s, got c = {c}, s = {s}")]
    BadAmplificationGap { c: f64, s: f64 },

    #[error("target error must be positive, got {delta}")]
    BadTargetError { delta: f64 },

    #[error("eigenvalue {value} of a local term lies outside [0, 1]")]
    EigenvalueOutOfRange { value: f64 },

    #[error("soundness audit refused: instance is not verifiably rejecting (max acceptance {max_acceptance:.3e})")]
    AuditRefused { max_acceptance: f64 },

    #[error("Lanczos did not converge after {iterations} iterations (residual {residual:.3e})")]
    LanczosNotConverged { iterations: usize, residual: f64 },

    #[error("eigendecomposition failed: {0}")]
    Linalg(String),
}

pub type Result<T> = std::result::Result<T, Error>;
