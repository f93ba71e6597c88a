//! The replayable record of one protocol run.
//!
//! Everything a party announced (receipts, decoy reveals, outcomes) is an
//! event; an eavesdropper sees exactly the events. The god view carries
//! simulation-only diagnostics (true bits, key fidelities) that no party
//! or eavesdropper can access; it exists for analysis and tests.

use serde::{Deserialize, Serialize};

use super::DialogueConfig;
use crate::quantum::Basis;

/// Protocol step identifiers, also used to tag where a run aborted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    /// Key generation and distribution.
    Step1,
    /// Alice's encryption and transmission.
    Step2,
    /// Bob's decryption, encoding and transmission.
    Step3,
    /// Alice's encoding and public announcement.
    Step4,
    /// Bilateral key rotation.
    Step5,
}

impl std::fmt::Display for Step {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Step::Step1 => "step1",
            Step::Step2 => "step2",
            Step::Step3 => "step3",
            Step::Step4 => "step4",
            Step::Step5 => "step5",
        };
        write!(f, "{s}")
    }
}

/// One public event in the run. Order within the transcript follows the
/// protocol's causal order exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TranscriptEvent {
    /// The key pairs were prepared (setup only).
    KeyPrepared {
        pairs: usize,
    },
    /// Fresh traveling photons were prepared for this round.
    TravelingPrepared {
        count: usize,
    },
    DecoysInserted {
        step: Step,
        count: usize,
    },
    SequenceSent {
        step: Step,
        length: usize,
    },
    /// The receiver confirmed receipt of a sequence.
    Receipt {
        step: Step,
    },
    /// The sender revealed decoy positions and preparation bases.
    DecoyReveal {
        step: Step,
        positions: Vec<usize>,
        bases: Vec<Basis>,
    },
    /// The receiver announced its decoy measurement outcomes.
    DecoyOutcomes {
        step: Step,
        outcomes: Vec<bool>,
    },
    /// The sender's comparison of records against outcomes.
    DecoyCheck {
        step: Step,
        mismatches: usize,
        count: usize,
        error_rate: f64,
        passed: bool,
    },
    /// The per-photon measurement outcomes Alice announces publicly.
    Announcements {
        bits: Vec<bool>,
    },
    /// The end-of-round bilateral key rotation. `warning` flags angles
    /// in the breakable set kπ ± π/4.
    Rotation {
        theta: f64,
        warning: bool,
    },
    Abort {
        step: Step,
    },
}

/// Per-photon ground truth, simulation-only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonRecord {
    pub round: usize,
    pub index: usize,
    /// The bit Alice prepared the traveling photon in.
    pub m: bool,
    /// What Bob measured after decryption (absent if the round aborted
    /// before his measurement).
    pub bob_measured_m: Option<bool>,
    /// The publicly announced outcome (absent if aborted earlier).
    pub announced: Option<bool>,
}

/// Simulation-only diagnostics. Nothing here is visible to the parties
/// or to an eavesdropper.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GodView {
    pub photons: Vec<PhotonRecord>,
    /// True message bits per round, flattened (empty on abort).
    pub true_alice_bits: Vec<bool>,
    pub true_bob_bits: Vec<bool>,
    /// Minimum ⟨Φ⁺|ρ|Φ⁺⟩ across key pairs, sampled after each round's
    /// rotation.
    pub key_fidelity_per_round: Vec<f64>,
    /// Largest entrywise deviation of any in-flight encrypted photon's
    /// reduced density matrix from I/2, across the whole run.
    pub max_ciphertext_dm_deviation: f64,
    pub alice_decode_errors: usize,
    pub bob_decode_errors: usize,
    /// Bits each party decoded over the run.
    pub decoded_bits_per_party: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub events: Vec<TranscriptEvent>,
}

/// Complete record of one run. Serializes to a versioned JSON document;
/// identical (config, seed) pairs produce byte-identical serializations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub schema_version: u32,
    pub config: DialogueConfig,
    pub seed: u64,
    /// Key establishment events (the protocol's first step).
    pub setup: Vec<TranscriptEvent>,
    pub rounds: Vec<RoundRecord>,
    /// Bits Alice decoded (her counterpart's message), flattened across
    /// rounds. Empty if the run aborted.
    pub decoded_alice: Vec<bool>,
    pub decoded_bob: Vec<bool>,
    pub aborted: bool,
    pub abort_step: Option<Step>,
    /// Round in which the abort happened; 0 means during setup.
    pub abort_round: Option<usize>,
    pub god_view: GodView,
}

impl Transcript {
    /// Serialize to the canonical JSON form (pretty, trailing newline).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("transcript serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Transcript, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// All events in causal order: setup first, then each round.
    pub fn all_events(&self) -> impl Iterator<Item = &TranscriptEvent> {
        self.setup
            .iter()
            .chain(self.rounds.iter().flat_map(|r| r.events.iter()))
    }

    /// Publicly announced outcome bits, flattened across rounds.
    pub fn announcements(&self) -> Vec<bool> {
        self.all_events()
            .filter_map(|e| match e {
                TranscriptEvent::Announcements { bits } => Some(bits.iter().copied()),
                _ => None,
            })
            .flatten()
            .collect()
    }

    /// Decoy check events, optionally restricted to one step.
    pub fn decoy_checks(&self, step: Option<Step>) -> Vec<(Step, usize, usize)> {
        self.all_events()
            .filter_map(|e| match e {
                TranscriptEvent::DecoyCheck {
                    step: s,
                    mismatches,
                    count,
                    ..
                } if step.is_none() || step == Some(*s) => Some((*s, *mismatches, *count)),
                _ => None,
            })
            .collect()
    }
}
