//! Command-line front end: config parsing, seeded experiment execution,
//! and artifact emission. The `qdialogue` binary is a thin wrapper over
//! this module.
//!
//! Config files are strict JSON: unknown keys are rejected, every field
//! has a default, and `--seed` / `--trials` flags win over file values.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 protocol
//! abort, 4 I/O failure, 5 internal self-check failure.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adversary::AttackModel;
use crate::analysis::{
    audit_transcript, efficiency, emit_report, theta_sweep, wilson_interval, EfficiencyReport,
    ReportFormat, ReportInputs, ThetaSweepConfig,
};
use crate::protocol::{
    run_dialogue, DecoyPolicy, Dialogue, DialogueConfig, MessageSource, StepOutcome, ThetaSchedule,
};
use crate::seeds::derive_seed;

pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const ABORT: i32 = 3;
    pub const IO: i32 = 4;
    pub const SELF_CHECK: i32 = 5;
}

/// Sweep-specific settings; the sweep runs small fast instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub n: usize,
    pub rounds: usize,
    pub thetas: Vec<f64>,
    pub attack: AttackModel,
    pub decoy: DecoyPolicy,
}

impl Default for SweepSection {
    fn default() -> Self {
        let d = ThetaSweepConfig::default();
        SweepSection {
            n: d.n,
            rounds: d.rounds,
            thetas: vec![
                std::f64::consts::FRAC_PI_8,
                std::f64::consts::FRAC_PI_4,
                3.0 * std::f64::consts::FRAC_PI_8,
            ],
            attack: d.attack,
            decoy: d.decoy,
        }
    }
}

/// One config file drives every subcommand. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n: usize,
    pub rounds: usize,
    pub decoy: DecoyPolicy,
    pub theta: ThetaSchedule,
    pub attack: AttackModel,
    pub messages: MessageSource,
    pub seed: u64,
    pub trials: usize,
    pub include_decoys: bool,
    pub strict_classical: bool,
    pub sweep: SweepSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        let d = DialogueConfig::default();
        RunConfig {
            n: d.n,
            rounds: d.rounds,
            decoy: d.decoy,
            theta: d.theta,
            attack: d.attack,
            messages: d.messages,
            seed: 1,
            trials: 1000,
            include_decoys: false,
            strict_classical: false,
            sweep: SweepSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let text =
            fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("malformed config {}: {e}", path.display()))
    }

    pub fn dialogue_config(&self) -> DialogueConfig {
        DialogueConfig {
            n: self.n,
            rounds: self.rounds,
            decoy: self.decoy.clone(),
            theta: self.theta.clone(),
            attack: self.attack.clone(),
            messages: self.messages.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Common per-invocation options after flag/config merging.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub config: RunConfig,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Invocation {
    /// Merge a config file (if any) with overriding flags; flags win.
    pub fn assemble(
        config_path: Option<&Path>,
        seed: Option<u64>,
        trials: Option<usize>,
        out: Option<PathBuf>,
        format: OutputFormat,
    ) -> Result<Invocation, String> {
        let mut config = match config_path {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = seed {
            config.seed = s;
        }
        if let Some(t) = trials {
            if t == 0 {
                return Err("trials must be >= 1".into());
            }
            config.trials = t;
        }
        Ok(Invocation {
            config,
            out,
            format,
        })
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    exit_code::USAGE
}

fn io_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    exit_code::IO
}

/// Run one dialogue and write the full transcript (JSON only).
pub fn cmd_dialogue(inv: &Invocation) -> i32 {
    if inv.format == OutputFormat::Csv {
        return usage_error("the dialogue transcript is a JSON document; use --format json");
    }
    let config = inv.config.dialogue_config();
    if let Err(e) = config.validate() {
        return usage_error(&e.to_string());
    }
    let transcript = match run_dialogue(&config, inv.config.seed) {
        Ok(t) => t,
        Err(e) => return usage_error(&e.to_string()),
    };
    let aborted = transcript.aborted;
    let abort_step = transcript.abort_step;
    if let Err(e) = emit(inv.out.as_deref(), &transcript.to_json()) {
        return io_error(&e);
    }
    if aborted {
        let step = abort_step.map(|s| s.to_string()).unwrap_or_default();
        eprintln!("protocol aborted at {step}: decoy check failed");
        return exit_code::ABORT;
    }
    exit_code::SUCCESS
}

/// Sweep rotation angles under the configured attack.
pub fn cmd_attack_sweep(inv: &Invocation) -> i32 {
    let sweep = &inv.config.sweep;
    if sweep.thetas.len() < 2 {
        return usage_error("attack-sweep needs at least 2 theta values");
    }
    let sweep_config = ThetaSweepConfig {
        n: sweep.n,
        rounds: sweep.rounds,
        trials: inv.config.trials,
        attack: sweep.attack.clone(),
        decoy: sweep.decoy.clone(),
    };
    let result = match theta_sweep(&sweep.thetas, &sweep_config, inv.config.seed) {
        Ok(r) => r,
        Err(e) => return usage_error(&e.to_string()),
    };
    let content = match inv.format {
        OutputFormat::Csv => result.to_csv(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&result).expect("sweep serializes");
            s.push('\n');
            s
        }
    };
    if let Err(e) = emit(inv.out.as_deref(), &content) {
        return io_error(&e);
    }
    exit_code::SUCCESS
}

#[derive(Serialize)]
struct EfficiencyOutput {
    formula: EfficiencyReport,
    audit: EfficiencyReport,
    matches: bool,
}

/// Closed-formula efficiency cross-checked against a transcript audit of
/// an actual simulated run; any disagreement is an internal error.
pub fn cmd_efficiency(inv: &Invocation) -> i32 {
    let cfg = &inv.config;
    let mut run_config = cfg.dialogue_config();
    run_config.attack = AttackModel::none();
    if let Err(e) = run_config.validate() {
        return usage_error(&e.to_string());
    }
    let formula = efficiency(
        cfg.n,
        cfg.rounds,
        cfg.include_decoys,
        cfg.strict_classical,
        &cfg.decoy,
    );
    let transcript = match run_dialogue(&run_config, cfg.seed) {
        Ok(t) => t,
        Err(e) => return usage_error(&e.to_string()),
    };
    if transcript.aborted {
        eprintln!("error: unattacked audit run aborted unexpectedly");
        return exit_code::SELF_CHECK;
    }
    let audit = audit_transcript(&transcript, cfg.include_decoys, cfg.strict_classical);
    let matches = formula == audit;
    let content = match inv.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&EfficiencyOutput {
                formula: formula.clone(),
                audit: audit.clone(),
                matches,
            })
            .expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let reports = [formula.clone(), audit.clone()];
            let inputs = ReportInputs {
                efficiency: &reports,
                ..Default::default()
            };
            emit_report(&inputs, ReportFormat::Csv).expect("nonempty inputs")
        }
    };
    if let Err(e) = emit(inv.out.as_deref(), &content) {
        return io_error(&e);
    }
    if !matches {
        eprintln!(
            "error: efficiency self-check failed: formula (b_s={}, q_t={}, b_t={}) vs audit (b_s={}, q_t={}, b_t={})",
            formula.b_s, formula.q_t, formula.b_t, audit.b_s, audit.q_t, audit.b_t
        );
        return exit_code::SELF_CHECK;
    }
    exit_code::SUCCESS
}

#[derive(Serialize)]
struct KeygenCheckReport {
    trials: usize,
    aborts: usize,
    abort_rate: f64,
    abort_ci: (f64, f64),
    decoys_checked: usize,
    decoy_mismatches: usize,
    per_decoy_rate: f64,
    per_decoy_ci: (f64, f64),
    /// Mean over non-aborted trials of the worst key-pair fidelity with
    /// the ideal entangled pair (simulation-only diagnostic).
    mean_min_key_fidelity: Option<f64>,
}

/// Run key establishment only, many times, and report how often it
/// aborts, the decoy error rate, and the distributed key's fidelity.
pub fn cmd_keygen_check(inv: &Invocation) -> i32 {
    let cfg = &inv.config;
    let run_config = cfg.dialogue_config();
    if let Err(e) = run_config.validate() {
        return usage_error(&e.to_string());
    }
    let mut aborts = 0usize;
    let mut decoys_checked = 0usize;
    let mut decoy_mismatches = 0usize;
    let mut fidelity_sum = 0.0f64;
    let mut fidelity_count = 0usize;
    for trial in 0..cfg.trials {
        let seed = derive_seed(cfg.seed, trial as u64);
        let mut session = match Dialogue::new(run_config.clone(), seed) {
            Ok(s) => s,
            Err(e) => return usage_error(&e.to_string()),
        };
        let outcome = match session.establish_key() {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {e}");
                return exit_code::SELF_CHECK;
            }
        };
        match outcome {
            StepOutcome::Aborted => aborts += 1,
            StepOutcome::Continue => {
                let key = session.key().expect("key present after establishment");
                let mut min_f = f64::INFINITY;
                for pair in &key.pairs {
                    match session.registry().epr_fidelity(pair.alice, pair.bob) {
                        Ok(f) => min_f = min_f.min(f),
                        Err(e) => {
                            eprintln!("error: {e}");
                            return exit_code::SELF_CHECK;
                        }
                    }
                }
                fidelity_sum += min_f;
                fidelity_count += 1;
            }
        }
        for (_, mismatches, count) in session.into_transcript().decoy_checks(None) {
            decoy_mismatches += mismatches;
            decoys_checked += count;
        }
    }
    let report = KeygenCheckReport {
        trials: cfg.trials,
        aborts,
        abort_rate: aborts as f64 / cfg.trials as f64,
        abort_ci: wilson_interval(aborts as u64, cfg.trials as u64, 1.96),
        decoys_checked,
        decoy_mismatches,
        per_decoy_rate: if decoys_checked == 0 {
            0.0
        } else {
            decoy_mismatches as f64 / decoys_checked as f64
        },
        per_decoy_ci: wilson_interval(decoy_mismatches as u64, decoys_checked as u64, 1.96),
        mean_min_key_fidelity: (fidelity_count > 0).then(|| fidelity_sum / fidelity_count as f64),
    };
    let content = match inv.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut s = String::from(
                "trials,aborts,abort_rate,decoys_checked,decoy_mismatches,per_decoy_rate,mean_min_key_fidelity\n",
            );
            s.push_str(&format!(
                "{},{},{:.6},{},{},{:.6},{}\n",
                report.trials,
                report.aborts,
                report.abort_rate,
                report.decoys_checked,
                report.decoy_mismatches,
                report.per_decoy_rate,
                report
                    .mean_min_key_fidelity
                    .map(|f| format!("{f:.9}"))
                    .unwrap_or_default()
            ));
            s
        }
    };
    if let Err(e) = emit(inv.out.as_deref(), &content) {
        return io_error(&e);
    }
    exit_code::SUCCESS
}
