//! Desk-scale simulator for a two-way quantum dialogue protocol that
//! encrypts its traveling photons with a reusable entangled key.
//!
//! Two parties share EPR pairs as a private quantum key. Each round,
//! one party encrypts a freshly prepared traveling photon onto the key
//! with a CNOT, the other decrypts it the same way, and both encode one
//! secret bit each with I/X before a single public measurement outcome
//! is announced. Decoy photons guard every transmission, and a bilateral
//! key rotation closes each round so the key can be reused.
//!
//! The crate exposes:
//!
//! - [`quantum`]: an exact dense statevector engine with a qubit registry.
//! - [`protocol`]: the five-step dialogue session, decoy machinery, and a
//!   replayable transcript of every run.
//! - [`adversary`]: pluggable eavesdropper models (intercept-resend and
//!   CNOT entangle-ancilla) plus what the eavesdropper can infer from
//!   public announcements.
//! - [`analysis`]: leakage entropy, information-theoretical efficiency
//!   with a transcript audit, rotation-angle sweeps, and report emission.
//! - [`cli`]: the command-line front end used by the `qdialogue` binary.
//!
//! Every experiment is seeded and replays bit-exactly; see [`seeds`].
//! The `examples/` directory has one runnable walkthrough per capability.

pub mod adversary;
pub mod analysis;
pub mod cli;
pub mod protocol;
pub mod quantum;
pub mod seeds;
