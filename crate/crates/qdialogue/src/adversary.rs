//! Eavesdropper models and what an eavesdropper can infer.
//!
//! Attacks transform in-flight transmissions position-blind: the decoys
//! and payload photons in a sequence all carry the same maximally mixed
//! reduced state, so the attack hook only receives an ordered list of
//! qubit handles. Public announcements (decoy reveals, outcome bits) are
//! fed to the eavesdropper as they happen.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::wilson_interval;
use crate::protocol::{run_dialogue, DialogueConfig, ProtocolError, Step};
use crate::quantum::{Basis, QuantumError, QubitId, QubitRegistry, StateLabel};
use crate::seeds::derive_seed;

/// Which basis the intercept-resend attacker measures in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisStrategy {
    /// Always measure in Z.
    AlwaysZ,
    /// Pick Z or X uniformly per photon.
    RandomZx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackKind {
    /// No attack; the channel is ideal.
    None,
    /// Measure each photon and forward a fresh one in the measured state.
    InterceptResend { basis_strategy: BasisStrategy },
    /// Append a fresh |0⟩ ancilla per photon and apply a CNOT with the
    /// traveling photon as control and the ancilla as target.
    EntangleAncilla,
}

/// An attack and the transmission it targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackModel {
    pub kind: AttackKind,
    /// Which transmission is attacked: the key distribution (step1), the
    /// ciphertext flight (step2) or the encoded return flight (step3).
    pub target_step: Step,
}

impl AttackModel {
    pub fn none() -> AttackModel {
        AttackModel {
            kind: AttackKind::None,
            target_step: Step::Step1,
        }
    }

    pub fn intercept_resend(target_step: Step, basis_strategy: BasisStrategy) -> AttackModel {
        AttackModel {
            kind: AttackKind::InterceptResend { basis_strategy },
            target_step,
        }
    }

    pub fn entangle_ancilla(target_step: Step) -> AttackModel {
        AttackModel {
            kind: AttackKind::EntangleAncilla,
            target_step,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self.kind, AttackKind::None)
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        if !matches!(self.target_step, Step::Step1 | Step::Step2 | Step::Step3) {
            return Err(ProtocolError::InvalidConfig(format!(
                "attack target must be a transmission step, got {}",
                self.target_step
            )));
        }
        Ok(())
    }
}

/// One intercept-resend capture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterceptRecord {
    pub step: Step,
    pub slot: usize,
    pub basis: Basis,
    pub outcome: bool,
}

/// One retained ancilla from an entangle attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AncillaRecord {
    pub step: Step,
    pub slot: usize,
    pub qubit: QubitId,
}

/// Everything the eavesdropper has seen or holds.
#[derive(Debug, Default, Clone)]
pub struct EveKnowledge {
    pub intercepted: Vec<InterceptRecord>,
    pub ancillae: Vec<AncillaRecord>,
    pub announcements: Vec<bool>,
}

impl EveKnowledge {
    /// The eavesdropper's posterior over both parties' bits for one
    /// announced outcome. Without knowledge of the photon's initial
    /// state this is uniform regardless of the announcement.
    pub fn posterior(&self, announcement_index: usize) -> [f64; 4] {
        eve_posterior(self.announcements[announcement_index], None)
    }
}

/// Posterior over (r, k) ∈ {00, 01, 10, 11} given an announced outcome,
/// indexed as 2r + k.
///
/// Not knowing the traveling photon's initial bit leaves all four
/// possibilities equally likely. Knowing it (as legacy protocols that
/// announce the initial state allow) collapses the posterior onto the
/// two pairs with r ⊕ k = announced ⊕ m.
pub fn eve_posterior(announced: bool, known_m: Option<bool>) -> [f64; 4] {
    match known_m {
        None => [0.25; 4],
        Some(m) => {
            let parity = announced ^ m;
            let mut p = [0.0; 4];
            for r in 0..2usize {
                for k in 0..2usize {
                    if ((r ^ k) == 1) == parity {
                        p[2 * r + k] = 0.5;
                    }
                }
            }
            p
        }
    }
}

/// The eavesdropper attached to a session's channel. Holds its own RNG
/// stream so that enabling or disabling an attack never perturbs the
/// honest parties' draws.
pub struct Eavesdropper {
    model: AttackModel,
    knowledge: EveKnowledge,
    rng: ChaCha8Rng,
}

impl Eavesdropper {
    pub fn new(model: AttackModel, seed: u64) -> Eavesdropper {
        Eavesdropper {
            model,
            knowledge: EveKnowledge::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn model(&self) -> &AttackModel {
        &self.model
    }

    pub fn knowledge(&self) -> &EveKnowledge {
        &self.knowledge
    }

    /// Transform one in-flight transmission. `qubits` is the ordered
    /// sequence as the channel carries it; roles (payload vs decoy) are
    /// invisible here, so the attack hits every photon alike. Forwarded
    /// substitutes replace entries in place.
    pub fn intercept(
        &mut self,
        step: Step,
        registry: &mut QubitRegistry,
        qubits: &mut [QubitId],
    ) -> Result<(), QuantumError> {
        if self.model.is_none() || self.model.target_step != step {
            return Ok(());
        }
        match self.model.kind.clone() {
            AttackKind::None => {}
            AttackKind::InterceptResend { basis_strategy } => {
                for (slot, q) in qubits.iter_mut().enumerate() {
                    let basis = match basis_strategy {
                        BasisStrategy::AlwaysZ => Basis::Z,
                        BasisStrategy::RandomZx => {
                            if self.rng.gen_bool(0.5) {
                                Basis::Z
                            } else {
                                Basis::X
                            }
                        }
                    };
                    let outcome = registry.measure_and_discard(*q, basis, &mut self.rng)?;
                    let fresh = registry.alloc(StateLabel::from_basis_bit(basis, outcome));
                    self.knowledge.intercepted.push(InterceptRecord {
                        step,
                        slot,
                        basis,
                        outcome,
                    });
                    *q = fresh;
                }
            }
            AttackKind::EntangleAncilla => {
                for (slot, &q) in qubits.iter().enumerate() {
                    let ancilla = registry.alloc(StateLabel::Zero);
                    registry.apply_cnot(q, ancilla)?;
                    self.knowledge.ancillae.push(AncillaRecord {
                        step,
                        slot,
                        qubit: ancilla,
                    });
                }
            }
        }
        Ok(())
    }

    /// Public announcements are visible to everyone, the eavesdropper
    /// included.
    pub fn observe_announcements(&mut self, bits: &[bool]) {
        self.knowledge.announcements.extend_from_slice(bits);
    }
}

/// Monte Carlo estimate of how detectable an attack is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionEstimate {
    pub trials: usize,
    /// Decoy comparisons observed on the attacked step.
    pub decoys_checked: usize,
    pub decoy_mismatches: usize,
    pub per_decoy_rate: f64,
    /// 95% confidence interval on the per-decoy rate.
    pub per_decoy_ci: (f64, f64),
    pub aborts: usize,
    pub abort_rate: f64,
    pub abort_ci: (f64, f64),
}

/// Run `trials` independent seeded protocol runs under `model` and count
/// decoy mismatches on the targeted step plus whole-run aborts. With no
/// attack the counts cover every decoy check (and come out zero on an
/// ideal channel).
pub fn estimate_detection_probability(
    model: &AttackModel,
    base_config: &DialogueConfig,
    trials: usize,
    master_seed: u64,
) -> Result<DetectionEstimate, ProtocolError> {
    assert!(trials >= 1, "trials must be >= 1");
    let mut config = base_config.clone();
    config.attack = model.clone();
    config.validate()?;

    let step_filter = if model.is_none() {
        None
    } else {
        Some(model.target_step)
    };
    let mut decoys_checked = 0usize;
    let mut decoy_mismatches = 0usize;
    let mut aborts = 0usize;
    for trial in 0..trials {
        let transcript = run_dialogue(&config, derive_seed(master_seed, trial as u64))?;
        for (_, mismatches, count) in transcript.decoy_checks(step_filter) {
            decoys_checked += count;
            decoy_mismatches += mismatches;
        }
        if transcript.aborted {
            aborts += 1;
        }
    }

    let per_decoy_rate = if decoys_checked == 0 {
        0.0
    } else {
        decoy_mismatches as f64 / decoys_checked as f64
    };
    Ok(DetectionEstimate {
        trials,
        decoys_checked,
        decoy_mismatches,
        per_decoy_rate,
        per_decoy_ci: wilson_interval(decoy_mismatches as u64, decoys_checked as u64, 1.96),
        aborts,
        abort_rate: aborts as f64 / trials as f64,
        abort_ci: wilson_interval(aborts as u64, trials as u64, 1.96),
    })
}

/// Exact per-decoy error probability for an attack, by enumeration over
/// the four decoy states, the attacker's basis choices, and the
/// measurement outcome branches. This is the analytic oracle the Monte
/// Carlo estimates are checked against.
pub fn enumerate_per_decoy_error(kind: &AttackKind) -> f64 {
    match kind {
        AttackKind::None => 0.0,
        AttackKind::InterceptResend { basis_strategy } => {
            let mut total = 0.0;
            for label in StateLabel::ALL {
                let eve_bases: &[(Basis, f64)] = match basis_strategy {
                    BasisStrategy::AlwaysZ => &[(Basis::Z, 1.0)],
                    BasisStrategy::RandomZx => &[(Basis::Z, 0.5), (Basis::X, 0.5)],
                };
                for &(eve_basis, basis_weight) in eve_bases {
                    // Same basis: Eve's outcome reproduces the decoy state
                    // exactly, the receiver sees no error. Different
                    // basis: Eve forwards an eigenstate of the wrong
                    // basis, and the receiver's measurement in the
                    // original basis errs with probability 1/2.
                    let err = if eve_basis == label.basis() { 0.0 } else { 0.5 };
                    total += 0.25 * basis_weight * err;
                }
            }
            total
        }
        AttackKind::EntangleAncilla => {
            // Z-state decoys commute with the CNOT; X-state decoys get
            // entangled with the ancilla and err with probability 1/2.
            let mut total = 0.0;
            for label in StateLabel::ALL {
                let err = match label.basis() {
                    Basis::Z => 0.0,
                    Basis::X => 0.5,
                };
                total += 0.25 * err;
            }
            total
        }
    }
}
