//! Deterministic seed derivation.
//!
//! Every experiment takes one master seed. Per-trial and per-role seeds
//! are derived with a SplitMix64 mix of (master, index), so growing the
//! trial count never perturbs the seeds of earlier trials, and trials can
//! be fanned out across workers without coordination.

/// Mix a master seed with a stream index into an independent 64-bit seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    // SplitMix64 finalizer over master + (index+1)·golden-gamma.
    let mut z = master.wrapping_add((index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fixed stream indices for the roles inside one protocol run, so adding
/// or removing an eavesdropper never shifts the honest parties' draws.
pub mod stream {
    pub const ALICE: u64 = 0x0A;
    pub const BOB: u64 = 0x0B;
    pub const EVE: u64 = 0x0E;
    pub const THETA: u64 = 0x7E;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_distinct() {
        let a = derive_seed(42, 0);
        assert_eq!(a, derive_seed(42, 0));
        assert_ne!(a, derive_seed(42, 1));
        assert_ne!(a, derive_seed(43, 0));
        // Changing the trial count leaves earlier trials untouched by
        // construction; spot-check a few indices.
        let early: Vec<u64> = (0..10).map(|i| derive_seed(7, i)).collect();
        let again: Vec<u64> = (0..10).map(|i| derive_seed(7, i)).collect();
        assert_eq!(early, again);
    }
}
