//! Reusing one entangled key across many rounds: bilateral rotations
//! leave the key exactly intact, and the amortized cost drives the
//! information-theoretical efficiency toward 1.
//!
//! ```bash
//! cargo run --example key_reuse
//! ```

use qdialogue::analysis::{audit_transcript, efficiency};
use qdialogue::protocol::{run_dialogue, DecoyPolicy, DialogueConfig, ThetaSchedule};

fn main() {
    let config = DialogueConfig {
        n: 4,
        rounds: 25,
        theta: ThetaSchedule::Random,
        ..DialogueConfig::default()
    };
    let transcript = run_dialogue(&config, 31415).expect("valid config");
    assert!(!transcript.aborted);

    let fidelities = &transcript.god_view.key_fidelity_per_round;
    let worst = fidelities.iter().cloned().fold(f64::INFINITY, f64::min);
    println!(
        "{} rounds on one key, worst post-rotation key fidelity: {worst:.15}",
        fidelities.len()
    );
    assert!(worst > 1.0 - 1e-9);

    println!(
        "all {} decoded bits correct on both sides: {}",
        transcript.decoded_alice.len() * 2,
        transcript.decoded_alice == transcript.god_view.true_bob_bits
            && transcript.decoded_bob == transcript.god_view.true_alice_bits
    );

    // Efficiency: the two key qubits amortize away with reuse.
    println!("\nrounds   eta        (b_s, q_t, b_t per run)");
    let policy = DecoyPolicy::default();
    for rounds in [1usize, 2, 10, 100, 1000] {
        let report = efficiency(1, rounds, false, false, &policy);
        println!(
            "{rounds:>6}   {:.6}   ({}, {}, {})",
            report.eta, report.b_s, report.q_t, report.b_t
        );
    }

    // The formula is honest: an audit that counts every qubit and
    // classical bit in the recorded run lands on identical numbers.
    let formula = efficiency(config.n, config.rounds, false, false, &config.decoy);
    let audit = audit_transcript(&transcript, false, false);
    println!(
        "\naudit of the {}-round run: b_s={}, q_t={}, b_t={}, eta={:.6} (formula agrees: {})",
        config.rounds,
        audit.b_s,
        audit.q_t,
        audit.b_t,
        audit.eta,
        formula == audit
    );
    assert_eq!(formula, audit);
}
