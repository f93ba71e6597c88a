//! The quantum encryption core, one photon at a time: the encrypting
//! CNOT lifts (key ⊗ photon) into a GHZ state whose traveling part is
//! maximally mixed, and the decrypting CNOT restores the exact product.
//!
//! ```bash
//! cargo run --example ghz_encryption
//! ```

use qdialogue::quantum::{DensityMatrix, QubitRegistry, StateLabel};

fn main() {
    for m in [false, true] {
        let mut registry = QubitRegistry::new();
        let (alice_key, bob_key) = registry.alloc_epr();
        let photon = registry.alloc(if m { StateLabel::One } else { StateLabel::Zero });

        println!("photon prepared as |{}⟩", m as u8);

        // Alice encrypts: CNOT with her key half as control.
        registry.apply_cnot(alice_key, photon).unwrap();
        let amps = registry.amplitudes_of(photon).unwrap();
        println!("  joint state after encryption (|key key photon⟩ basis):");
        for (idx, amp) in amps.iter().enumerate() {
            if amp.norm_sqr() > 1e-12 {
                println!("    |{idx:03b}⟩: {:+.4}", amp.re);
            }
        }

        // In flight, the photon alone carries no information.
        let rho = registry.reduced_density(&[photon]).unwrap();
        let deviation = rho.max_deviation_from(&DensityMatrix::maximally_mixed(2));
        println!("  in-flight reduced state deviates from I/2 by {deviation:.2e}");

        // Bob decrypts with his half and the product state returns.
        registry.apply_cnot(bob_key, photon).unwrap();
        let p0 = registry.prob_zero(photon).unwrap();
        println!("  after decryption P(photon = 0) = {p0:.1}");
        let key_fidelity = registry.epr_fidelity(alice_key, bob_key).unwrap();
        println!("  key fidelity with the ideal pair: {key_fidelity:.12}\n");

        assert!(deviation < 1e-12);
        assert!((key_fidelity - 1.0).abs() < 1e-12);
        assert_eq!(p0 < 0.5, m);
    }
    println!("ciphertext reveals nothing; decryption is exact; the key survives");
}
