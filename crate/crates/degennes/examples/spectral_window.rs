//! Shrink a spectral window [e - delta, e + delta] around a fixed energy and
//! watch the extremal band slopes over its preimage converge linearly to the
//! branch slopes at e. The left branch dominates: |mu'| is larger there.

use degennes::{current_window, BandContext, DiscretizationConfig};

fn main() -> degennes::Result<()> {
    let cfg = DiscretizationConfig {
        grid_points: 1200,
        target_tol: 1e-7,
        ..Default::default()
    };
    let ctx = BandContext::build(&cfg)?;
    let e = ctx.theta0() + 0.05;

    println!("window center e = theta_0 + 0.05 = {e:.8}");
    println!(
        "{:>8} {:>16} {:>16} {:>16} {:>8}",
        "delta", "lambda_min/h", "lambda_max/h", "radius/h", "side"
    );
    for delta in [1e-2, 1e-3, 1e-4] {
        let r = current_window(&ctx, e, delta)?;
        println!(
            "{delta:>8.0e} {:>16.10} {:>16.10} {:>16.10} {:>8}",
            r.lambda_min_over_h, r.lambda_max_over_h, r.spectral_radius_over_h, r.dominant_side
        );
    }
    Ok(())
}
