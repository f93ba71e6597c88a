//! The five-step dialogue protocol: key establishment over a checked
//! channel, per-round encrypt/decrypt/encode/announce, and key rotation.
//!
//! A [`Dialogue`] session owns the qubit registry for both parties plus
//! any eavesdropper, executes the steps in order, and records every
//! public event (and a clearly separated god view) in a [`Transcript`].
//! A failed decoy check is a first-class outcome, not an error: the run
//! aborts, the key is burned, and the transcript says where.

mod decoy;
mod session;
mod transcript;

pub use decoy::{
    check_decoys, insert_decoys, DecoyMode, DecoyPolicy, DecoyRecord, PhotonSequence, Role,
};
pub use session::{Dialogue, QuantumKey, StepOutcome};
pub use transcript::{GodView, PhotonRecord, RoundRecord, Step, Transcript, TranscriptEvent};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::AttackModel;
use crate::quantum::QuantumError;

pub const TRANSCRIPT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid decoy policy: {0}")]
    InvalidPolicy(String),
    #[error("decoy records and outcomes differ in length: {0} vs {1}")]
    DecoyCountMismatch(usize, usize),
    #[error("session used out of order: {0}")]
    OutOfOrder(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// An ordered vector of secret message bits, one per traveling photon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SecretMessage(pub Vec<bool>);

impl SecretMessage {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }
}

impl From<Vec<bool>> for SecretMessage {
    fn from(bits: Vec<bool>) -> Self {
        SecretMessage(bits)
    }
}

/// How each round's secret messages are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MessageSource {
    /// Fresh uniformly random bits every round.
    Random,
    /// The same fixed messages every round.
    Fixed {
        alice: SecretMessage,
        bob: SecretMessage,
    },
}

/// The pre-agreed rotation angle schedule, one angle per round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ThetaSchedule {
    /// The same angle every round.
    Constant { theta: f64 },
    /// Explicit per-round angles, reused cyclically if rounds exceed it.
    List { thetas: Vec<f64> },
    /// A fresh uniform angle in [0, 2π) each round, drawn from the
    /// schedule's own seeded stream.
    Random,
}

impl ThetaSchedule {
    pub(crate) fn theta_for_round<R: rand::Rng>(&self, round_index: usize, rng: &mut R) -> f64 {
        match self {
            ThetaSchedule::Constant { theta } => *theta,
            ThetaSchedule::List { thetas } => thetas[round_index % thetas.len()],
            ThetaSchedule::Random => rng.gen::<f64>() * std::f64::consts::TAU,
        }
    }
}

/// Angles where the rotation defense is known to be breakable:
/// θ = kπ ± π/4. Using one emits a security warning in the transcript.
pub fn is_forbidden_theta(theta: f64) -> bool {
    let r = theta.rem_euclid(std::f64::consts::PI);
    let quarter = std::f64::consts::FRAC_PI_4;
    (r - quarter).abs() < 1e-9 || (r - 3.0 * quarter).abs() < 1e-9
}

/// Full configuration of one dialogue run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DialogueConfig {
    /// Payload photons (and secret bits per party) per round.
    pub n: usize,
    /// Key-reuse rounds executed after the single key establishment.
    pub rounds: usize,
    pub decoy: DecoyPolicy,
    pub theta: ThetaSchedule,
    pub attack: AttackModel,
    pub messages: MessageSource,
}

impl Default for DialogueConfig {
    fn default() -> Self {
        DialogueConfig {
            n: 8,
            rounds: 1,
            decoy: DecoyPolicy::default(),
            theta: ThetaSchedule::Constant {
                theta: std::f64::consts::FRAC_PI_3,
            },
            attack: AttackModel::none(),
            messages: MessageSource::Random,
        }
    }
}

impl DialogueConfig {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.n == 0 {
            return Err(ProtocolError::InvalidConfig("n must be >= 1".into()));
        }
        if self.rounds == 0 {
            return Err(ProtocolError::InvalidConfig("rounds must be >= 1".into()));
        }
        self.decoy.validate(self.n)?;
        if let ThetaSchedule::List { thetas } = &self.theta {
            if thetas.is_empty() {
                return Err(ProtocolError::InvalidConfig(
                    "theta list must not be empty".into(),
                ));
            }
        }
        if let MessageSource::Fixed { alice, bob } = &self.messages {
            if alice.len() != self.n || bob.len() != self.n {
                return Err(ProtocolError::InvalidConfig(format!(
                    "fixed messages must have length n = {}, got {} and {}",
                    self.n,
                    alice.len(),
                    bob.len()
                )));
            }
        }
        Ok(())
    }
}

/// Recover the other party's bit from the announced outcome, one's own
/// operation bit, and the traveling photon's initial bit: a ⊕ m ⊕ own.
pub fn decode_counterpart_bit(m: bool, own_op: bool, announced: bool) -> bool {
    announced ^ m ^ own_op
}

/// Run one complete dialogue: key establishment once, then the configured
/// number of rounds, reusing and rotating the key between rounds.
pub fn run_dialogue(config: &DialogueConfig, seed: u64) -> Result<Transcript, ProtocolError> {
    let mut session = Dialogue::new(config.clone(), seed)?;
    if session.establish_key()? == StepOutcome::Continue {
        for _ in 0..config.rounds {
            if session.run_round()? == StepOutcome::Aborted {
                break;
            }
        }
    }
    Ok(session.into_transcript())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_matches_worked_example() {
        // Announced 1 with m = 0: the counterpart's operation bit was 1
        // for Alice (own = 0) and 0 for Bob (own = 1).
        assert!(decode_counterpart_bit(false, false, true));
        assert!(!decode_counterpart_bit(false, true, true));
        assert!(decode_counterpart_bit(true, true, true));
    }

    #[test]
    fn decode_is_exhaustively_consistent() {
        for m in [false, true] {
            for r in [false, true] {
                for k in [false, true] {
                    let announced = m ^ r ^ k;
                    assert_eq!(decode_counterpart_bit(m, r, announced), k);
                    assert_eq!(decode_counterpart_bit(m, k, announced), r);
                }
            }
        }
    }

    #[test]
    fn forbidden_angles_are_flagged() {
        use std::f64::consts::{FRAC_PI_4, PI};
        assert!(is_forbidden_theta(FRAC_PI_4));
        assert!(is_forbidden_theta(3.0 * FRAC_PI_4));
        assert!(is_forbidden_theta(PI + FRAC_PI_4));
        assert!(is_forbidden_theta(-FRAC_PI_4));
        assert!(!is_forbidden_theta(0.0));
        assert!(!is_forbidden_theta(FRAC_PI_4 / 2.0));
        assert!(!is_forbidden_theta(PI / 3.0));
    }

    #[test]
    fn config_validation_rejects_degenerate_setups() {
        let mut cfg = DialogueConfig {
            n: 0,
            ..DialogueConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.n = 4;
        cfg.rounds = 0;
        assert!(cfg.validate().is_err());
        cfg.rounds = 1;
        cfg.messages = MessageSource::Fixed {
            alice: vec![true; 3].into(),
            bob: vec![false; 4].into(),
        };
        assert!(cfg.validate().is_err());
        cfg.messages = MessageSource::Random;
        assert!(cfg.validate().is_ok());
    }
}
