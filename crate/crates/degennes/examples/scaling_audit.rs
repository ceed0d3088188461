//! Semiclassical scaling audit: instantiate every ledger constant with its
//! predicted h-power inside a window e = theta_0 + a h^alpha, run the
//! explicit resolvent bound across a log grid of h, and compare the fitted
//! decay exponent of C_final with min(-2 + 3a, -3/2 + a, -1 - a).

use degennes::{scaling_audit, AuditOptions, BandContext, DiscretizationConfig};

fn main() -> degennes::Result<()> {
    let cfg = DiscretizationConfig {
        grid_points: 1200,
        target_tol: 1e-7,
        ..Default::default()
    };
    let ctx = BandContext::build(&cfg)?;

    println!("{:>6} {:>12} {:>12} {:>10}", "alpha", "fitted", "predicted", "|diff|");
    for alpha in [0.0, 0.2, 0.25, 0.5] {
        let audit = scaling_audit(&ctx, &AuditOptions::new(alpha))?;
        let diff = (audit.fitted_slope - audit.expected_slope).abs();
        println!(
            "{alpha:>6} {:>12.5} {:>12.5} {:>10.5}",
            audit.fitted_slope, audit.expected_slope, diff
        );
        assert!(diff < 0.05);
    }
    Ok(())
}
