//! One photon, step by step: Alice's first secret bit is 0, Bob's is 1,
//! and the traveling photon starts as |0⟩. Bob's X flips it to |1⟩,
//! Alice's I leaves it, the announced outcome is 1, and each side reads
//! the other's bit from outcome ⊕ initial ⊕ own-operation.
//!
//! ```bash
//! cargo run --example worked_example
//! ```

use qdialogue::protocol::decode_counterpart_bit;
use qdialogue::quantum::{Basis, Gate, QubitRegistry, StateLabel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let (r, k, m) = (false, true, false);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut registry = QubitRegistry::new();

    println!(
        "alice's bit r = {}, bob's bit k = {}, photon m = {}\n",
        r as u8, k as u8, m as u8
    );

    let (alice_key, bob_key) = registry.alloc_epr();
    println!(
        "key pair shared: fidelity with the ideal entangled pair = {}",
        registry.epr_fidelity(alice_key, bob_key).unwrap()
    );

    let photon = registry.alloc(if m { StateLabel::One } else { StateLabel::Zero });
    registry.apply_cnot(alice_key, photon).unwrap();
    println!("alice encrypts (CNOT from her key half); photon leaves as half of a GHZ state");

    registry.apply_cnot(bob_key, photon).unwrap();
    let measured = registry
        .measure_and_discard(photon, Basis::Z, &mut rng)
        .unwrap();
    println!("bob decrypts and measures the photon: |{}⟩", measured as u8);

    let fresh = registry.alloc(if measured {
        StateLabel::One
    } else {
        StateLabel::Zero
    });
    registry.apply_single(&Gate::encoding(k), fresh).unwrap();
    println!(
        "bob re-prepares the photon and encodes his bit with {}",
        Gate::encoding(k)
    );

    registry.apply_single(&Gate::encoding(r), fresh).unwrap();
    let announced = registry
        .measure_and_discard(fresh, Basis::Z, &mut rng)
        .unwrap();
    println!(
        "alice encodes her bit with {} and announces the outcome: |{}⟩\n",
        Gate::encoding(r),
        announced as u8
    );

    let alice_reads = decode_counterpart_bit(m, r, announced);
    let bob_reads = decode_counterpart_bit(measured, k, announced);
    println!(
        "alice reads bob's bit:  {} ⊕ {} ⊕ {} = {}",
        announced as u8, m as u8, r as u8, alice_reads as u8
    );
    println!(
        "bob reads alice's bit:  {} ⊕ {} ⊕ {} = {}",
        announced as u8, measured as u8, k as u8, bob_reads as u8
    );
    assert_eq!(alice_reads, k);
    assert_eq!(bob_reads, r);

    println!(
        "\nkey pair after the exchange: fidelity = {}",
        registry.epr_fidelity(alice_key, bob_key).unwrap()
    );
    println!("the key is untouched and ready for the next round after rotation");
}
