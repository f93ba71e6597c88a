//! Exact small-register quantum state engine.
//!
//! Everything in this crate that touches amplitudes lives here: dense
//! statevectors, the handful of gates the protocol needs, projective
//! measurement, reduced density matrices and entropy helpers, plus a
//! qubit registry that tracks many small independent registers and
//! merges them only when an entangling operation spans two of them.
//!
//! Registers in this protocol never exceed a few qubits, so a dense
//! `Vec<Complex64>` of length 2^n is the right representation; no
//! sparse or stabilizer backend is attempted.

mod density;
mod gate;
mod registry;
mod state;

pub use density::DensityMatrix;
pub use gate::Gate;
pub use registry::{QubitId, QubitRegistry};
pub use state::{fidelity, shannon_entropy, Basis, StateLabel, StateVector};

use thiserror::Error;

/// Errors from quantum-state operations. All of these indicate caller
/// bugs (bad indices, malformed distributions), not physical outcomes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("unknown state label `{0}` (expected one of 0, 1, +, -)")]
    UnknownLabel(String),
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("control and target must differ (both were {0})")]
    ControlEqualsTarget(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("keep set must be a nonempty set of distinct in-range qubits")]
    BadKeepSet,
    #[error("invalid probability distribution: {0}")]
    BadDistribution(String),
    #[error("gate {0} is not single-qubit")]
    NotSingleQubit(String),
    #[error("unknown qubit handle {0:?}")]
    UnknownQubit(QubitId),
    #[error("qubit {0:?} is still correlated with its register and cannot be discarded")]
    NotSeparable(QubitId),
}

/// Tolerance for exact-algebra checks (single analytic identities).
pub const TOL_EXACT: f64 = 1e-12;
/// Tolerance for accumulated multi-gate sequences.
pub const TOL_ACCUMULATED: f64 = 1e-9;
