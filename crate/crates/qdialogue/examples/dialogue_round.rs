//! Run one complete dialogue and check that both parties decoded each
//! other's secret message.
//!
//! ```bash
//! cargo run --example dialogue_round
//! ```

use qdialogue::protocol::{run_dialogue, DialogueConfig, MessageSource};

fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn main() {
    let config = DialogueConfig {
        n: 8,
        rounds: 1,
        messages: MessageSource::Fixed {
            alice: vec![false, true, true, false, true, false, false, true].into(),
            bob: vec![true, true, false, false, false, true, false, true].into(),
        },
        ..DialogueConfig::default()
    };
    let transcript = run_dialogue(&config, 2024).expect("valid config");

    println!("aborted:        {}", transcript.aborted);
    println!(
        "alice sent:     {}",
        bits_to_string(&transcript.god_view.true_alice_bits)
    );
    println!(
        "bob decoded:    {}",
        bits_to_string(&transcript.decoded_bob)
    );
    println!(
        "bob sent:       {}",
        bits_to_string(&transcript.god_view.true_bob_bits)
    );
    println!(
        "alice decoded:  {}",
        bits_to_string(&transcript.decoded_alice)
    );
    println!(
        "announcements:  {}",
        bits_to_string(&transcript.announcements())
    );

    assert_eq!(transcript.decoded_alice, transcript.god_view.true_bob_bits);
    assert_eq!(transcript.decoded_bob, transcript.god_view.true_alice_bits);
    println!("\nboth directions decoded correctly through one traveling photon each");

    // The same (config, seed) replays to the bit.
    let replay = run_dialogue(&config, 2024).expect("valid config");
    assert_eq!(replay.to_json(), transcript.to_json());
    println!("replay with the same seed is byte-identical");
}
