//! How decoy photons catch an intercept-resend attacker: the exact
//! enumeration oracle says 1/4 of decoy comparisons mismatch, Monte
//! Carlo agrees, and with 20 decoys per transmission a run aborts with
//! probability 1 − (3/4)^20 ≈ 0.997.
//!
//! ```bash
//! cargo run --release --example decoy_detection
//! ```

use qdialogue::adversary::{
    enumerate_per_decoy_error, estimate_detection_probability, AttackKind, AttackModel,
    BasisStrategy,
};
use qdialogue::protocol::{DecoyPolicy, DialogueConfig, Step};

fn main() {
    let oracle = enumerate_per_decoy_error(&AttackKind::InterceptResend {
        basis_strategy: BasisStrategy::RandomZx,
    });
    println!("enumeration oracle per-decoy error rate: {oracle}");

    let config = DialogueConfig {
        n: 4,
        rounds: 1,
        decoy: DecoyPolicy::with_count(20),
        ..DialogueConfig::default()
    };

    for (label, strategy) in [
        ("always Z", BasisStrategy::AlwaysZ),
        ("random Z/X", BasisStrategy::RandomZx),
    ] {
        let model = AttackModel::intercept_resend(Step::Step1, strategy);
        let est = estimate_detection_probability(&model, &config, 2000, 11).unwrap();
        println!("\nintercept-resend ({label}) over {} trials:", est.trials);
        println!(
            "  per-decoy error rate: {:.4}  (95% CI {:.4}..{:.4}, {} decoys)",
            est.per_decoy_rate, est.per_decoy_ci.0, est.per_decoy_ci.1, est.decoys_checked
        );
        println!(
            "  run abort rate:       {:.4}  (expected {:.4})",
            est.abort_rate,
            1.0 - 0.75f64.powi(20)
        );
        assert!((est.per_decoy_rate - oracle).abs() < 0.01);
    }

    // The clean channel never trips the check.
    let clean = estimate_detection_probability(&AttackModel::none(), &config, 200, 12).unwrap();
    println!(
        "\nno attack: per-decoy rate {}, abort rate {}",
        clean.per_decoy_rate, clean.abort_rate
    );
    assert_eq!(clean.per_decoy_rate, 0.0);
    assert_eq!(clean.abort_rate, 0.0);
}
