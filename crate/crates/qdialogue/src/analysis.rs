//! Quantitative analysis: leakage entropy, information-theoretical
//! efficiency (formula and transcript audit), rotation-angle sweeps, and
//! report emission.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::AttackModel;
use crate::protocol::{
    run_dialogue, DecoyPolicy, DialogueConfig, MessageSource, ProtocolError, Step, ThetaSchedule,
    Transcript, TranscriptEvent,
};
use crate::quantum::shannon_entropy;
use crate::seeds::derive_seed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("report inputs are empty")]
    EmptyReport,
    #[error("invalid posterior: {0}")]
    InvalidPosterior(String),
    #[error("theta sweep needs at least one theta and one trial")]
    InvalidSweep,
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// 95%-style Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// How much of the two secret bits an announcement leaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leakage {
    /// Shannon entropy of the eavesdropper's posterior over (r, k).
    pub entropy_bits: f64,
    /// 2 − entropy: the information leaked per photon pair of bits.
    pub leaked_bits: f64,
}

/// Entropy of a 4-outcome posterior over (r, k), and the implied leakage.
pub fn leakage_bits(posterior: &[f64]) -> Result<Leakage, AnalysisError> {
    if posterior.len() != 4 {
        return Err(AnalysisError::InvalidPosterior(format!(
            "expected 4 probabilities, got {}",
            posterior.len()
        )));
    }
    let entropy_bits =
        shannon_entropy(posterior).map_err(|e| AnalysisError::InvalidPosterior(e.to_string()))?;
    Ok(Leakage {
        entropy_bits,
        leaked_bits: 2.0 - entropy_bits,
    })
}

/// Resource accounting for one run shape. All counts are whole-run
/// totals, so the formula and the transcript audit can be compared as
/// exact integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub n: usize,
    pub rounds: usize,
    /// Count decoy qubits toward q_t (off by default: the accounting
    /// tracks payload resources only).
    pub include_decoys: bool,
    /// Count receipts and decoy reveals toward b_t (off by default: only
    /// the per-photon outcome announcement is a classical-bit cost).
    pub strict_classical: bool,
    /// Secret bits exchanged: two per announced photon.
    pub b_s: u64,
    /// Qubits used: one traveling photon per exchange plus the two key
    /// qubits per pair, paid once and amortized over reuse.
    pub q_t: u64,
    /// Classical bits exchanged.
    pub b_t: u64,
    /// b_s / (q_t + b_t).
    pub eta: f64,
}

fn eta_of(b_s: u64, q_t: u64, b_t: u64) -> f64 {
    b_s as f64 / (q_t + b_t) as f64
}

/// Bits needed to reveal one decoy's position in a sequence of `len`.
fn position_bits(len: usize) -> u64 {
    (len.max(2) as f64).log2().ceil() as u64
}

/// Closed-form efficiency for an unattacked run of `n` photons over
/// `rounds` key reuses.
pub fn efficiency(
    n: usize,
    rounds: usize,
    include_decoys: bool,
    strict_classical: bool,
    policy: &DecoyPolicy,
) -> EfficiencyReport {
    assert!(n >= 1 && rounds >= 1);
    let n64 = n as u64;
    let r64 = rounds as u64;
    let b_s = 2 * n64 * r64;
    let decoys_per_transmission = policy.resolve(n) as u64;
    let transmissions = 1 + 2 * r64;
    let mut q_t = n64 * r64 + 2 * n64;
    if include_decoys {
        q_t += decoys_per_transmission * transmissions;
    }
    let mut b_t = n64 * r64;
    if strict_classical {
        // Receipts: one bit per transmission. Reveals: position, basis
        // and outcome per decoy, with positions indexed into the padded
        // sequence.
        b_t += transmissions;
        let seq_len = n + decoys_per_transmission as usize;
        b_t += decoys_per_transmission * transmissions * (position_bits(seq_len) + 2);
    }
    EfficiencyReport {
        n,
        rounds,
        include_decoys,
        strict_classical,
        b_s,
        q_t,
        b_t,
        eta: eta_of(b_s, q_t, b_t),
    }
}

/// Count every qubit and classical bit in a recorded run. The counts use
/// the same conventions as [`efficiency`], so for an unattacked complete
/// run the two reports are equal field for field.
pub fn audit_transcript(
    transcript: &Transcript,
    include_decoys: bool,
    strict_classical: bool,
) -> EfficiencyReport {
    let mut key_qubits = 0u64;
    let mut traveling = 0u64;
    let mut decoys = 0u64;
    let mut announced = 0u64;
    let mut receipts = 0u64;
    let mut reveal_bits = 0u64;
    let mut last_seq_len = 0usize;
    for event in transcript.all_events() {
        match event {
            TranscriptEvent::KeyPrepared { pairs } => key_qubits += 2 * *pairs as u64,
            TranscriptEvent::TravelingPrepared { count } => traveling += *count as u64,
            TranscriptEvent::DecoysInserted { count, .. } => decoys += *count as u64,
            TranscriptEvent::SequenceSent { length, .. } => last_seq_len = *length,
            TranscriptEvent::Receipt { .. } => receipts += 1,
            TranscriptEvent::DecoyReveal { positions, .. } => {
                reveal_bits += positions.len() as u64 * (position_bits(last_seq_len) + 1);
            }
            TranscriptEvent::DecoyOutcomes { outcomes, .. } => {
                reveal_bits += outcomes.len() as u64;
            }
            TranscriptEvent::Announcements { bits } => announced += bits.len() as u64,
            _ => {}
        }
    }
    let b_s = 2 * announced;
    let mut q_t = traveling + key_qubits;
    if include_decoys {
        q_t += decoys;
    }
    let mut b_t = announced;
    if strict_classical {
        b_t += receipts + reveal_bits;
    }
    EfficiencyReport {
        n: transcript.config.n,
        rounds: transcript.rounds.len(),
        include_decoys,
        strict_classical,
        b_s,
        q_t,
        b_t,
        eta: eta_of(b_s, q_t, b_t),
    }
}

/// Configuration of one rotation-angle sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSweepConfig {
    /// Key pairs (and photons) per trial.
    pub n: usize,
    /// Rounds per trial; the attack's effect on the rotated key shows up
    /// from the second round on.
    pub rounds: usize,
    /// Independent trials per angle.
    pub trials: usize,
    pub attack: AttackModel,
    /// Decoy policy for the sweep runs. Disabled by default so the
    /// dialogue metric isolates the rotation's effect; an enabled policy
    /// measures decoy error rates (and aborts runs) instead.
    pub decoy: DecoyPolicy,
}

impl Default for ThetaSweepConfig {
    fn default() -> Self {
        ThetaSweepConfig {
            n: 2,
            rounds: 2,
            trials: 1000,
            attack: AttackModel::entangle_ancilla(Step::Step2),
            decoy: DecoyPolicy::disabled(),
        }
    }
}

/// Disturbance metrics for one angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaPoint {
    pub theta: f64,
    /// Decoy mismatch rate across all checks (0 when decoys are off).
    pub metric_decoy: f64,
    /// Wrong decoded bits over all decoded bits, both parties.
    pub metric_dialogue: f64,
    /// max(metric_decoy, metric_dialogue).
    pub disturbance: f64,
    pub trials: usize,
    /// 95% Wilson interval on the dialogue bit-error rate.
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSweepResult {
    pub config: ThetaSweepConfig,
    /// Points sorted by ascending theta.
    pub points: Vec<ThetaPoint>,
}

impl ThetaSweepResult {
    /// CSV with the documented columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,metric_decoy,metric_dialogue,trials,ci_low,ci_high\n");
        for p in &self.points {
            out.push_str(&format!(
                "{:.9},{:.6},{:.6},{},{:.6},{:.6}\n",
                p.theta, p.metric_decoy, p.metric_dialogue, p.trials, p.ci_low, p.ci_high
            ));
        }
        out
    }
}

/// Run the attacked protocol across a list of rotation angles and record
/// the disturbance each angle leaves in the dialogue and the decoys.
pub fn theta_sweep(
    thetas: &[f64],
    config: &ThetaSweepConfig,
    master_seed: u64,
) -> Result<ThetaSweepResult, AnalysisError> {
    if thetas.is_empty() || config.trials == 0 {
        return Err(AnalysisError::InvalidSweep);
    }
    let mut sorted = thetas.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite theta"));

    let mut points = Vec::with_capacity(sorted.len());
    for &theta in &sorted {
        let run_config = DialogueConfig {
            n: config.n,
            rounds: config.rounds,
            decoy: config.decoy.clone(),
            theta: ThetaSchedule::Constant { theta },
            attack: config.attack.clone(),
            messages: MessageSource::Random,
        };
        // Per-theta seed streams keyed by the angle's bit pattern, so
        // adding or removing angles never perturbs the others.
        let theta_seed = derive_seed(master_seed, theta.to_bits());
        let mut bit_errors = 0u64;
        let mut bits_decoded = 0u64;
        let mut decoy_mismatches = 0u64;
        let mut decoys_checked = 0u64;
        for trial in 0..config.trials {
            let transcript = run_dialogue(&run_config, derive_seed(theta_seed, trial as u64))?;
            let gv = &transcript.god_view;
            bit_errors += (gv.alice_decode_errors + gv.bob_decode_errors) as u64;
            bits_decoded += 2 * gv.decoded_bits_per_party as u64;
            for (_, mismatches, count) in transcript.decoy_checks(None) {
                decoy_mismatches += mismatches as u64;
                decoys_checked += count as u64;
            }
        }
        let metric_dialogue = if bits_decoded == 0 {
            0.0
        } else {
            bit_errors as f64 / bits_decoded as f64
        };
        let metric_decoy = if decoys_checked == 0 {
            0.0
        } else {
            decoy_mismatches as f64 / decoys_checked as f64
        };
        let (ci_low, ci_high) = wilson_interval(bit_errors, bits_decoded, 1.96);
        points.push(ThetaPoint {
            theta,
            metric_decoy,
            metric_dialogue,
            disturbance: metric_decoy.max(metric_dialogue),
            trials: config.trials,
            ci_low,
            ci_high,
        });
    }
    Ok(ThetaSweepResult {
        config: config.clone(),
        points,
    })
}

/// Condensed view of a run for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptSummary {
    pub seed: u64,
    pub n: usize,
    pub rounds_completed: usize,
    pub aborted: bool,
    pub abort_step: Option<Step>,
    pub announced_bits: usize,
    pub alice_decode_errors: usize,
    pub bob_decode_errors: usize,
}

impl TranscriptSummary {
    pub fn of(t: &Transcript) -> TranscriptSummary {
        TranscriptSummary {
            seed: t.seed,
            n: t.config.n,
            rounds_completed: t.rounds.len(),
            aborted: t.aborted,
            abort_step: t.abort_step,
            announced_bits: t.announcements().len(),
            alice_decode_errors: t.god_view.alice_decode_errors,
            bob_decode_errors: t.god_view.bob_decode_errors,
        }
    }
}

/// The protocol's comparison-table row, with the efficiency computed
/// from an actual report rather than stated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub resource: String,
    pub measurement: String,
    pub efficiency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default)]
pub struct ReportInputs<'a> {
    pub transcripts: &'a [Transcript],
    pub sweeps: &'a [ThetaSweepResult],
    pub efficiency: &'a [EfficiencyReport],
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema_version: u32,
    transcripts: Vec<TranscriptSummary>,
    sweeps: &'a [ThetaSweepResult],
    efficiency: &'a [EfficiencyReport],
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison_row: Option<ComparisonRow>,
}

/// Serialize analysis results. JSON nests everything in one document;
/// CSV emits one section per input kind with documented columns. Output
/// is deterministic for identical inputs.
pub fn emit_report(
    inputs: &ReportInputs<'_>,
    format: ReportFormat,
) -> Result<String, AnalysisError> {
    if inputs.transcripts.is_empty() && inputs.sweeps.is_empty() && inputs.efficiency.is_empty() {
        return Err(AnalysisError::EmptyReport);
    }
    let comparison_row = inputs
        .efficiency
        .iter()
        .max_by_key(|r| r.rounds)
        .map(|r| ComparisonRow {
            resource: "nearly single photons".into(),
            measurement: "single-photon measurements".into(),
            efficiency: r.eta,
        });
    match format {
        ReportFormat::Json => {
            let report = JsonReport {
                schema_version: 1,
                transcripts: inputs
                    .transcripts
                    .iter()
                    .map(TranscriptSummary::of)
                    .collect(),
                sweeps: inputs.sweeps,
                efficiency: inputs.efficiency,
                comparison_row,
            };
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut out = String::new();
            if !inputs.transcripts.is_empty() {
                out.push_str("section,seed,n,rounds_completed,aborted,abort_step,announced_bits,alice_decode_errors,bob_decode_errors\n");
                for t in inputs.transcripts {
                    let s = TranscriptSummary::of(t);
                    out.push_str(&format!(
                        "transcript,{},{},{},{},{},{},{},{}\n",
                        s.seed,
                        s.n,
                        s.rounds_completed,
                        s.aborted,
                        s.abort_step.map(|x| x.to_string()).unwrap_or_default(),
                        s.announced_bits,
                        s.alice_decode_errors,
                        s.bob_decode_errors
                    ));
                }
            }
            for sweep in inputs.sweeps {
                out.push_str(&sweep.to_csv());
            }
            if !inputs.efficiency.is_empty() {
                out.push_str("section,n,rounds,include_decoys,strict_classical,b_s,q_t,b_t,eta\n");
                for r in inputs.efficiency {
                    out.push_str(&format!(
                        "efficiency,{},{},{},{},{},{},{},{:.9}\n",
                        r.n,
                        r.rounds,
                        r.include_decoys,
                        r.strict_classical,
                        r.b_s,
                        r.q_t,
                        r.b_t,
                        r.eta
                    ));
                }
            }
            if let Some(row) = comparison_row {
                out.push_str("section,resource,measurement,efficiency\n");
                out.push_str(&format!(
                    "comparison,{},{},{:.9}\n",
                    row.resource, row.measurement, row.efficiency
                ));
            }
            Ok(out)
        }
    }
}
