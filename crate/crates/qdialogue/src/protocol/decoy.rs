//! Decoy photon insertion and checking.
//!
//! Decoys are single qubits prepared uniformly in one of |0⟩, |1⟩, |+⟩,
//! |−⟩ and spliced into a transmission at secret positions. The receiver
//! later measures them in the revealed bases; any channel tampering shows
//! up as basis-mismatched outcomes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ProtocolError;
use crate::quantum::{QubitId, QubitRegistry, StateLabel};

/// Whether a sequence entry carries payload or is a decoy. The role is
/// known only to the sender; the channel (and any eavesdropper) sees an
/// undifferentiated list of qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Payload,
    Decoy,
}

/// The sender's record of one inserted decoy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoyRecord {
    pub position: usize,
    pub label: StateLabel,
}

/// An ordered transmission: payload qubits interleaved with decoys.
/// `decoy_records` stays with the sender until the reveal.
#[derive(Debug)]
pub struct PhotonSequence {
    entries: Vec<(QubitId, Role)>,
    decoy_records: Vec<DecoyRecord>,
}

impl PhotonSequence {
    pub fn from_payload(payload: Vec<QubitId>) -> PhotonSequence {
        PhotonSequence {
            entries: payload.into_iter().map(|q| (q, Role::Payload)).collect(),
            decoy_records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// What the channel carries: qubit handles only, roles hidden.
    pub fn qubit_ids(&self) -> Vec<QubitId> {
        self.entries.iter().map(|(q, _)| *q).collect()
    }

    /// Rebind entries after a transmission that may have substituted
    /// photons (same length, same order).
    pub fn rebind(&mut self, ids: &[QubitId]) {
        assert_eq!(ids.len(), self.entries.len());
        for (entry, id) in self.entries.iter_mut().zip(ids) {
            entry.0 = *id;
        }
    }

    pub fn decoy_records(&self) -> &[DecoyRecord] {
        &self.decoy_records
    }

    pub fn decoy_count(&self) -> usize {
        self.decoy_records.len()
    }

    /// Qubits at the recorded decoy positions, in record order.
    pub fn decoy_qubits(&self) -> Vec<QubitId> {
        self.decoy_records
            .iter()
            .map(|r| self.entries[r.position].0)
            .collect()
    }

    /// Payload qubits in their original order, decoys dropped.
    pub fn payload_qubits(&self) -> Vec<QubitId> {
        self.entries
            .iter()
            .filter(|(_, role)| *role == Role::Payload)
            .map(|(q, _)| *q)
            .collect()
    }
}

/// How many decoys to insert per transmission, and when to abort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoyPolicy {
    pub mode: DecoyMode,
    /// Abort when the measured decoy error rate exceeds this. The ideal
    /// noiseless channel uses 0.0: any mismatch aborts.
    pub error_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecoyMode {
    /// No decoys and no checking (analysis configurations only).
    Disabled,
    /// A fixed number of decoys per transmission.
    Count { count: usize },
    /// A fraction of the payload length, with a floor.
    Fraction { fraction: f64, min: usize },
}

impl Default for DecoyPolicy {
    fn default() -> Self {
        DecoyPolicy {
            mode: DecoyMode::Fraction {
                fraction: 0.25,
                min: 8,
            },
            error_threshold: 0.0,
        }
    }
}

impl DecoyPolicy {
    pub fn disabled() -> DecoyPolicy {
        DecoyPolicy {
            mode: DecoyMode::Disabled,
            error_threshold: 1.0,
        }
    }

    pub fn with_count(count: usize) -> DecoyPolicy {
        DecoyPolicy {
            mode: DecoyMode::Count { count },
            error_threshold: 0.0,
        }
    }

    pub fn checking_enabled(&self) -> bool {
        !matches!(self.mode, DecoyMode::Disabled)
    }

    /// Decoys per transmission for a given payload length.
    pub fn resolve(&self, payload_len: usize) -> usize {
        match self.mode {
            DecoyMode::Disabled => 0,
            DecoyMode::Count { count } => count,
            DecoyMode::Fraction { fraction, min } => {
                min.max((fraction * payload_len as f64).ceil() as usize)
            }
        }
    }

    pub fn validate(&self, payload_len: usize) -> Result<(), ProtocolError> {
        if !(0.0..=1.0).contains(&self.error_threshold) {
            return Err(ProtocolError::InvalidPolicy(format!(
                "error_threshold must be in [0, 1], got {}",
                self.error_threshold
            )));
        }
        if let DecoyMode::Fraction { fraction, .. } = self.mode {
            if !(0.0..=1.0).contains(&fraction) {
                return Err(ProtocolError::InvalidPolicy(format!(
                    "fraction must be in [0, 1], got {fraction}"
                )));
            }
        }
        if self.checking_enabled() && self.resolve(payload_len) == 0 {
            return Err(ProtocolError::InvalidPolicy(
                "checking is enabled but the policy resolves to zero decoys".into(),
            ));
        }
        Ok(())
    }
}

/// Insert freshly prepared decoys at uniformly random distinct positions.
/// Decoy states are drawn uniformly from {|0⟩, |1⟩, |+⟩, |−⟩}; the
/// records stay sender-side inside the returned sequence.
pub fn insert_decoys<R: Rng>(
    registry: &mut QubitRegistry,
    payload: Vec<QubitId>,
    policy: &DecoyPolicy,
    rng: &mut R,
) -> PhotonSequence {
    let count = policy.resolve(payload.len());
    if count == 0 {
        return PhotonSequence::from_payload(payload);
    }
    let total = payload.len() + count;
    let mut positions = rand::seq::index::sample(rng, total, count).into_vec();
    positions.sort_unstable();

    let mut entries = Vec::with_capacity(total);
    let mut records = Vec::with_capacity(count);
    let mut payload_iter = payload.into_iter();
    let mut next_decoy = positions.iter().peekable();
    for slot in 0..total {
        if next_decoy.peek() == Some(&&slot) {
            next_decoy.next();
            let label = StateLabel::ALL[rng.gen_range(0..4)];
            let q = registry.alloc(label);
            entries.push((q, Role::Decoy));
            records.push(DecoyRecord {
                position: slot,
                label,
            });
        } else {
            entries.push((payload_iter.next().expect("payload slot"), Role::Payload));
        }
    }
    PhotonSequence {
        entries,
        decoy_records: records,
    }
}

/// Compare the sender's decoy records against the receiver's measurement
/// outcomes (in the revealed bases) and return the error rate.
pub fn check_decoys(records: &[DecoyRecord], outcomes: &[bool]) -> Result<f64, ProtocolError> {
    if records.len() != outcomes.len() {
        return Err(ProtocolError::DecoyCountMismatch(
            records.len(),
            outcomes.len(),
        ));
    }
    if records.is_empty() {
        return Ok(0.0);
    }
    let mismatches = records
        .iter()
        .zip(outcomes)
        .filter(|(r, &o)| r.label.eigenvalue_bit() != o)
        .count();
    Ok(mismatches as f64 / records.len() as f64)
}
