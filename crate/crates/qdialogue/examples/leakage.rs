//! Why the announcement leaks nothing: a listener who never learns the
//! traveling photon's initial state faces four equally likely secret-bit
//! pairs (2.0 bits of entropy) for either announced outcome. Protocols
//! that announce the initial state hand the listener 1 of the 2 bits.
//!
//! ```bash
//! cargo run --example leakage
//! ```

use qdialogue::adversary::eve_posterior;
use qdialogue::analysis::leakage_bits;
use qdialogue::protocol::{run_dialogue, DialogueConfig};

fn main() {
    println!("posterior over (r, k) after hearing an announcement:\n");
    for announced in [false, true] {
        let blind = eve_posterior(announced, None);
        let l = leakage_bits(&blind).unwrap();
        println!(
            "  announced {}:  blind listener    {blind:?}  entropy {:.1} bits, leaked {:.1}",
            announced as u8, l.entropy_bits, l.leaked_bits
        );
        for m in [false, true] {
            let informed = eve_posterior(announced, Some(m));
            let l = leakage_bits(&informed).unwrap();
            println!(
                "  announced {}:  knowing m = {}    {informed:?}  entropy {:.1} bits, leaked {:.1}",
                announced as u8, m as u8, l.entropy_bits, l.leaked_bits
            );
        }
        println!();
    }

    // The same holds over an actual run's announcements.
    let transcript = run_dialogue(&DialogueConfig::default(), 400).unwrap();
    let announcements = transcript.announcements();
    let total_leak: f64 = announcements
        .iter()
        .map(|&a| leakage_bits(&eve_posterior(a, None)).unwrap().leaked_bits)
        .sum();
    println!(
        "run with {} announcements: total leaked bits = {total_leak}",
        announcements.len()
    );
    assert_eq!(total_leak, 0.0);
}
