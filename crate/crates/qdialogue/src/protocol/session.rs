//! The dialogue session: both parties' state machines run in lockstep
//! over a shared simulated channel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::decoy::{check_decoys, insert_decoys, PhotonSequence};
use super::transcript::{GodView, PhotonRecord, RoundRecord, Step, Transcript, TranscriptEvent};
use super::{
    decode_counterpart_bit, is_forbidden_theta, DialogueConfig, MessageSource, ProtocolError,
    TRANSCRIPT_SCHEMA_VERSION,
};
use crate::adversary::Eavesdropper;
use crate::quantum::{Basis, DensityMatrix, Gate, QubitId, QubitRegistry, StateLabel};
use crate::seeds::{derive_seed, stream};

/// Whether a checked step let the protocol continue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Continue,
    Aborted,
}

/// One shared key pair: Alice holds `alice`, Bob holds `bob`.
#[derive(Debug, Clone, Copy)]
pub struct KeyPair {
    pub alice: QubitId,
    pub bob: QubitId,
}

/// The shared quantum key: the EPR pair handles plus each side's record
/// of the rotations applied so far. The two logs advance in lockstep.
#[derive(Debug, Clone)]
pub struct QuantumKey {
    pub pairs: Vec<KeyPair>,
    pub alice_rotation_log: Vec<f64>,
    pub bob_rotation_log: Vec<f64>,
    pub round_counter: usize,
}

impl QuantumKey {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

enum RoundResult {
    Completed {
        announced: Vec<bool>,
        alice_decoded: Vec<bool>,
        bob_decoded: Vec<bool>,
    },
    Aborted(Step),
}

/// A full protocol session. Drives key establishment once, then any
/// number of rounds, recording every public event in the transcript.
pub struct Dialogue {
    config: DialogueConfig,
    seed: u64,
    registry: QubitRegistry,
    key: Option<QuantumKey>,
    eve: Eavesdropper,
    alice_rng: ChaCha8Rng,
    bob_rng: ChaCha8Rng,
    theta_rng: ChaCha8Rng,
    setup_events: Vec<TranscriptEvent>,
    rounds: Vec<RoundRecord>,
    decoded_alice: Vec<bool>,
    decoded_bob: Vec<bool>,
    god_view: GodView,
    aborted: bool,
    abort_step: Option<Step>,
    abort_round: Option<usize>,
    round: usize,
}

impl Dialogue {
    pub fn new(config: DialogueConfig, seed: u64) -> Result<Dialogue, ProtocolError> {
        config.validate()?;
        let eve = Eavesdropper::new(config.attack.clone(), derive_seed(seed, stream::EVE));
        Ok(Dialogue {
            alice_rng: ChaCha8Rng::seed_from_u64(derive_seed(seed, stream::ALICE)),
            bob_rng: ChaCha8Rng::seed_from_u64(derive_seed(seed, stream::BOB)),
            theta_rng: ChaCha8Rng::seed_from_u64(derive_seed(seed, stream::THETA)),
            config,
            seed,
            registry: QubitRegistry::new(),
            key: None,
            eve,
            setup_events: Vec::new(),
            rounds: Vec::new(),
            decoded_alice: Vec::new(),
            decoded_bob: Vec::new(),
            god_view: GodView::default(),
            aborted: false,
            abort_step: None,
            abort_round: None,
            round: 0,
        })
    }

    /// Key generation and distribution with a decoy check. On a failed
    /// check the whole key is burned and the session aborts.
    pub fn establish_key(&mut self) -> Result<StepOutcome, ProtocolError> {
        if self.key.is_some() || self.aborted {
            return Err(ProtocolError::OutOfOrder(
                "establish_key called twice or after abort".into(),
            ));
        }
        let n = self.config.n;
        let mut events = vec![TranscriptEvent::KeyPrepared { pairs: n }];

        let mut alice_halves = Vec::with_capacity(n);
        let mut payload = Vec::with_capacity(n);
        for _ in 0..n {
            let (a, b) = self.registry.alloc_epr();
            alice_halves.push(a);
            payload.push(b);
        }

        let policy = self.config.decoy.clone();
        let mut seq = insert_decoys(&mut self.registry, payload, &policy, &mut self.alice_rng);
        events.push(TranscriptEvent::DecoysInserted {
            step: Step::Step1,
            count: seq.decoy_count(),
        });
        self.transmit(Step::Step1, &mut seq, &mut events)?;

        let passed = self.decoy_check(Step::Step1, &seq, true, &mut events)?;
        if !passed {
            events.push(TranscriptEvent::Abort { step: Step::Step1 });
            self.setup_events = events;
            self.record_abort(Step::Step1, 0);
            return Ok(StepOutcome::Aborted);
        }

        let bob_halves = seq.payload_qubits();
        self.key = Some(QuantumKey {
            pairs: alice_halves
                .into_iter()
                .zip(bob_halves)
                .map(|(alice, bob)| KeyPair { alice, bob })
                .collect(),
            alice_rotation_log: Vec::new(),
            bob_rotation_log: Vec::new(),
            round_counter: 0,
        });
        self.setup_events = events;
        Ok(StepOutcome::Continue)
    }

    /// One full round: encrypt-and-send, decrypt-encode-return, encode
    /// and announce, then rotate the key. Message bits come from the
    /// configured source.
    pub fn run_round(&mut self) -> Result<StepOutcome, ProtocolError> {
        let (alice_bits, bob_bits) = self.draw_messages();
        self.run_round_with(&alice_bits, &bob_bits)
    }

    /// As [`run_round`](Self::run_round) but with explicit message bits.
    pub fn run_round_with(
        &mut self,
        alice_bits: &[bool],
        bob_bits: &[bool],
    ) -> Result<StepOutcome, ProtocolError> {
        if self.key.is_none() || self.aborted {
            return Err(ProtocolError::OutOfOrder(
                "run_round before establish_key or after abort".into(),
            ));
        }
        if alice_bits.len() != self.config.n || bob_bits.len() != self.config.n {
            return Err(ProtocolError::InvalidConfig(format!(
                "message length must equal n = {}",
                self.config.n
            )));
        }
        self.round += 1;
        let round = self.round;
        let mut events = Vec::new();

        let result = self.execute_round(alice_bits, bob_bits, &mut events)?;
        match result {
            RoundResult::Completed {
                announced,
                alice_decoded,
                bob_decoded,
            } => {
                // Bookkeeping for the god view: decode correctness.
                for (&decoded, &truth) in alice_decoded.iter().zip(bob_bits) {
                    if decoded != truth {
                        self.god_view.alice_decode_errors += 1;
                    }
                }
                for (&decoded, &truth) in bob_decoded.iter().zip(alice_bits) {
                    if decoded != truth {
                        self.god_view.bob_decode_errors += 1;
                    }
                }
                self.god_view.decoded_bits_per_party += announced.len();
                self.god_view.true_alice_bits.extend_from_slice(alice_bits);
                self.god_view.true_bob_bits.extend_from_slice(bob_bits);
                self.decoded_alice.extend(alice_decoded);
                self.decoded_bob.extend(bob_decoded);

                self.rotate_key(&mut events)?;
                self.rounds.push(RoundRecord { round, events });
                Ok(StepOutcome::Continue)
            }
            RoundResult::Aborted(step) => {
                events.push(TranscriptEvent::Abort { step });
                self.rounds.push(RoundRecord { round, events });
                self.record_abort(step, round);
                Ok(StepOutcome::Aborted)
            }
        }
    }

    fn execute_round(
        &mut self,
        alice_bits: &[bool],
        bob_bits: &[bool],
        events: &mut Vec<TranscriptEvent>,
    ) -> Result<RoundResult, ProtocolError> {
        let n = self.config.n;
        let round = self.round;
        let policy = self.config.decoy.clone();
        let key_pairs = self.key.as_ref().expect("key established").pairs.clone();

        // Alice's encryption: prepare each traveling photon in a random
        // Z state and entangle it with her key half.
        let mut prepared_m = Vec::with_capacity(n);
        let mut traveling = Vec::with_capacity(n);
        for pair in &key_pairs {
            let m = self.alice_rng.gen_bool(0.5);
            let p = self
                .registry
                .alloc(if m { StateLabel::One } else { StateLabel::Zero });
            self.registry.apply_cnot(pair.alice, p)?;
            prepared_m.push(m);
            traveling.push(p);
        }
        events.push(TranscriptEvent::TravelingPrepared { count: n });
        for (i, &m) in prepared_m.iter().enumerate() {
            self.god_view.photons.push(PhotonRecord {
                round,
                index: i,
                m,
                bob_measured_m: None,
                announced: None,
            });
        }
        // God view: ciphertext mixedness of each in-flight photon.
        let mixed = DensityMatrix::maximally_mixed(2);
        for &p in &traveling {
            let rho = self.registry.reduced_density(&[p])?;
            let dev = rho.max_deviation_from(&mixed);
            if dev > self.god_view.max_ciphertext_dm_deviation {
                self.god_view.max_ciphertext_dm_deviation = dev;
            }
        }

        let mut seq = insert_decoys(&mut self.registry, traveling, &policy, &mut self.alice_rng);
        events.push(TranscriptEvent::DecoysInserted {
            step: Step::Step2,
            count: seq.decoy_count(),
        });
        self.transmit(Step::Step2, &mut seq, events)?;
        if !self.decoy_check(Step::Step2, &seq, true, events)? {
            return Ok(RoundResult::Aborted(Step::Step2));
        }

        // Bob's decryption and encoding: decrypt with his key half,
        // learn the initial state, and send back a fresh photon with his
        // bit applied.
        let received = seq.payload_qubits();
        let photon_base = self.god_view.photons.len() - n;
        let mut bob_measured = Vec::with_capacity(n);
        let mut returning = Vec::with_capacity(n);
        for (i, (&p, pair)) in received.iter().zip(&key_pairs).enumerate() {
            self.registry.apply_cnot(pair.bob, p)?;
            let m = self
                .registry
                .measure_and_discard(p, Basis::Z, &mut self.bob_rng)?;
            bob_measured.push(m);
            self.god_view.photons[photon_base + i].bob_measured_m = Some(m);
            let fresh = self
                .registry
                .alloc(if m { StateLabel::One } else { StateLabel::Zero });
            self.registry
                .apply_single(&Gate::encoding(bob_bits[i]), fresh)?;
            returning.push(fresh);
        }

        let mut seq_back = insert_decoys(&mut self.registry, returning, &policy, &mut self.bob_rng);
        events.push(TranscriptEvent::DecoysInserted {
            step: Step::Step3,
            count: seq_back.decoy_count(),
        });
        self.transmit(Step::Step3, &mut seq_back, events)?;
        if !self.decoy_check(Step::Step3, &seq_back, false, events)? {
            return Ok(RoundResult::Aborted(Step::Step3));
        }

        // Alice's encoding and the public announcement.
        let returned = seq_back.payload_qubits();
        let mut announced = Vec::with_capacity(n);
        for (i, &p) in returned.iter().enumerate() {
            self.registry
                .apply_single(&Gate::encoding(alice_bits[i]), p)?;
            let a = self
                .registry
                .measure_and_discard(p, Basis::Z, &mut self.alice_rng)?;
            announced.push(a);
            self.god_view.photons[photon_base + i].announced = Some(a);
        }
        events.push(TranscriptEvent::Announcements {
            bits: announced.clone(),
        });
        self.eve.observe_announcements(&announced);

        let alice_decoded: Vec<bool> = announced
            .iter()
            .enumerate()
            .map(|(i, &a)| decode_counterpart_bit(prepared_m[i], alice_bits[i], a))
            .collect();
        let bob_decoded: Vec<bool> = announced
            .iter()
            .enumerate()
            .map(|(i, &a)| decode_counterpart_bit(bob_measured[i], bob_bits[i], a))
            .collect();

        Ok(RoundResult::Completed {
            announced,
            alice_decoded,
            bob_decoded,
        })
    }

    /// Bilateral rotation of every key pair by this round's angle.
    fn rotate_key(&mut self, events: &mut Vec<TranscriptEvent>) -> Result<(), ProtocolError> {
        let theta = self
            .config
            .theta
            .theta_for_round(self.round - 1, &mut self.theta_rng);
        let key = self.key.as_mut().expect("key established");
        for pair in &key.pairs {
            self.registry.apply_rotation(theta, pair.alice)?;
            self.registry.apply_rotation(theta, pair.bob)?;
        }
        key.alice_rotation_log.push(theta);
        key.bob_rotation_log.push(theta);
        key.round_counter += 1;
        events.push(TranscriptEvent::Rotation {
            theta,
            warning: is_forbidden_theta(theta),
        });

        // God view: worst-case key fidelity after the rotation.
        let pairs = key.pairs.clone();
        let mut min_fidelity = f64::INFINITY;
        for pair in &pairs {
            let f = self.registry.epr_fidelity(pair.alice, pair.bob)?;
            min_fidelity = min_fidelity.min(f);
        }
        self.god_view.key_fidelity_per_round.push(min_fidelity);
        Ok(())
    }

    /// Send a sequence through the channel: the eavesdropper (if any)
    /// transforms it position-blind, then the receiver confirms receipt.
    fn transmit(
        &mut self,
        step: Step,
        seq: &mut PhotonSequence,
        events: &mut Vec<TranscriptEvent>,
    ) -> Result<(), ProtocolError> {
        events.push(TranscriptEvent::SequenceSent {
            step,
            length: seq.len(),
        });
        let mut ids = seq.qubit_ids();
        self.eve.intercept(step, &mut self.registry, &mut ids)?;
        seq.rebind(&ids);
        events.push(TranscriptEvent::Receipt { step });
        Ok(())
    }

    /// The decoy check procedure: reveal, measure, announce, compare.
    /// Returns whether the transmission passed. `bob_measures` selects
    /// which party is the receiver.
    fn decoy_check(
        &mut self,
        step: Step,
        seq: &PhotonSequence,
        bob_measures: bool,
        events: &mut Vec<TranscriptEvent>,
    ) -> Result<bool, ProtocolError> {
        if !self.config.decoy.checking_enabled() {
            return Ok(true);
        }
        let records = seq.decoy_records().to_vec();
        let positions: Vec<usize> = records.iter().map(|r| r.position).collect();
        let bases: Vec<Basis> = records.iter().map(|r| r.label.basis()).collect();
        events.push(TranscriptEvent::DecoyReveal {
            step,
            positions,
            bases: bases.clone(),
        });

        let decoy_qubits = seq.decoy_qubits();
        let mut outcomes = Vec::with_capacity(decoy_qubits.len());
        for (&q, &basis) in decoy_qubits.iter().zip(&bases) {
            let rng = if bob_measures {
                &mut self.bob_rng
            } else {
                &mut self.alice_rng
            };
            outcomes.push(self.registry.measure_and_discard(q, basis, rng)?);
        }
        events.push(TranscriptEvent::DecoyOutcomes {
            step,
            outcomes: outcomes.clone(),
        });

        let error_rate = check_decoys(&records, &outcomes)?;
        let mismatches = (error_rate * records.len() as f64).round() as usize;
        let passed = error_rate <= self.config.decoy.error_threshold;
        events.push(TranscriptEvent::DecoyCheck {
            step,
            mismatches,
            count: records.len(),
            error_rate,
            passed,
        });
        Ok(passed)
    }

    fn draw_messages(&mut self) -> (Vec<bool>, Vec<bool>) {
        match &self.config.messages {
            MessageSource::Fixed { alice, bob } => (alice.0.clone(), bob.0.clone()),
            MessageSource::Random => {
                let alice = (0..self.config.n)
                    .map(|_| self.alice_rng.gen_bool(0.5))
                    .collect();
                let bob = (0..self.config.n)
                    .map(|_| self.bob_rng.gen_bool(0.5))
                    .collect();
                (alice, bob)
            }
        }
    }

    fn record_abort(&mut self, step: Step, round: usize) {
        self.aborted = true;
        self.abort_step = Some(step);
        self.abort_round = Some(round);
        self.key = None;
        // An aborted transcript carries no decoded messages.
        self.decoded_alice.clear();
        self.decoded_bob.clear();
        self.god_view.true_alice_bits.clear();
        self.god_view.true_bob_bits.clear();
    }

    pub fn aborted(&self) -> bool {
        self.aborted
    }

    pub fn key(&self) -> Option<&QuantumKey> {
        self.key.as_ref()
    }

    /// Simulation-only access to the underlying registers.
    pub fn registry(&self) -> &QubitRegistry {
        &self.registry
    }

    pub fn eavesdropper(&self) -> &Eavesdropper {
        &self.eve
    }

    pub fn god_view(&self) -> &GodView {
        &self.god_view
    }

    pub fn into_transcript(self) -> Transcript {
        Transcript {
            schema_version: TRANSCRIPT_SCHEMA_VERSION,
            config: self.config,
            seed: self.seed,
            setup: self.setup_events,
            rounds: self.rounds,
            decoded_alice: self.decoded_alice,
            decoded_bob: self.decoded_bob,
            aborted: self.aborted,
            abort_step: self.abort_step,
            abort_round: if self.aborted { self.abort_round } else { None },
            god_view: self.god_view,
        }
    }
}
