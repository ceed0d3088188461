//! Scan the edge-current functional c(e) = mu'(left preimage) + mu'(right
//! preimage) across (theta_0, 1) looking for a sign change. The right branch
//! climbs toward the Landau level 1 and contributes nothing at e >= 1, so the
//! current stays negative across the whole range.

use degennes::{algebraic_current, current_sign_scan, BandContext, DiscretizationConfig};

fn main() -> degennes::Result<()> {
    let cfg = DiscretizationConfig {
        grid_points: 1200,
        target_tol: 1e-7,
        ..Default::default()
    };
    let ctx = BandContext::build(&cfg)?;
    let theta0 = ctx.theta0();

    let scan = current_sign_scan(&ctx, theta0 + 1e-3, 1.0 - 1e-3, 21)?;
    println!("{:>12} {:>16}", "e", "c(e)");
    for row in &scan.rows {
        println!("{:>12.6} {:>16.10}", row.e, row.c);
    }
    match scan.e_star_candidate {
        Some(e) => println!("sign change near e = {e:.8}"),
        None => println!("no sign change: c < 0 on the whole scan range"),
    }

    // at the threshold the two branch slopes cancel exactly
    println!("c(theta_0) = {:.3e}", algebraic_current(&ctx, theta0)?);
    Ok(())
}
