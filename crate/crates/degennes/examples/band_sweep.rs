//! Sweep the first three band functions, print their minima, and run the
//! structural property checks (monotone branches, interlacing, Landau limits).

use degennes::{check_rappel, find_minimum, sample_band, DiscretizationConfig};

fn main() -> degennes::Result<()> {
    let cfg = DiscretizationConfig {
        grid_points: 1200,
        target_tol: 1e-7,
        ..Default::default()
    };

    let mut bands = Vec::new();
    for j in 1..=3 {
        bands.push(sample_band(j, -1.0, 6.0, 71, &cfg)?);
    }

    println!("{:>4} {:>14} {:>14} {:>12}", "band", "xi_star", "theta", "mu''");
    for band in &bands {
        let min = find_minimum(band)?;
        println!(
            "{:>4} {:>14.8} {:>14.8} {:>12.6}",
            band.band_index, min.xi_star, min.theta, min.second_derivative
        );
    }

    let report = check_rappel(&bands)?;
    for c in &report.checks {
        println!("{:<44} {} ({})", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail);
    }
    assert!(report.all_passed());
    Ok(())
}
