//! Edge-current functionals: the algebraic current c(e) built from the two
//! monotone branches of band 1, window extrema of the band derivative, and
//! Agmon-weighted localization of the fiber ground states.

use rayon::prelude::*;
use serde::Serialize;

use crate::band::{inverse_branch, BandContext, Branch, InverseValue};
use crate::error::{Error, Result};
use crate::quad::trapezoid_uniform;
use crate::solver::solve_fiber;

/// mu_1' at the preimage of e on one branch; the point at infinity
/// contributes zero (the derivative vanishes in the Landau limit).
fn branch_slope(ctx: &BandContext, e: f64, branch: Branch) -> Result<f64> {
    let inv = inverse_branch(&ctx.band, &ctx.minimum, ctx.theta1, e, branch)?;
    match inv.value {
        InverseValue::PlusInfinity => Ok(0.0),
        InverseValue::Finite(xi) => Ok(ctx.band.value_at(xi)?.1),
    }
}

/// Algebraic current c(e) = mu_1'(left preimage) + mu_1'(right preimage),
/// defined for e in [theta_0, theta_1).
pub fn algebraic_current(ctx: &BandContext, e: f64) -> Result<f64> {
    Ok(branch_slope(ctx, e, Branch::Left)? + branch_slope(ctx, e, Branch::Right)?)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanRow {
    pub e: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurrentScan {
    pub rows: Vec<ScanRow>,
    /// energy of the first sign change of c, if any (linear interpolation
    /// between the bracketing grid points)
    pub e_star_candidate: Option<f64>,
}

/// First strict sign change in a scan, located by linear interpolation.
/// Values below `atol` in magnitude count as zero so numerical noise around
/// a vanishing current is not reported as a crossing.
pub fn first_sign_change(rows: &[ScanRow], atol: f64) -> Option<f64> {
    rows.windows(2).find_map(|w| {
        if w[0].c.abs() > atol && w[1].c.abs() > atol && w[0].c * w[1].c < 0.0 {
            let t = w[0].c / (w[0].c - w[1].c);
            Some(w[0].e + t * (w[1].e - w[0].e))
        } else {
            None
        }
    })
}

/// Evaluate c on a uniform energy grid and look for a sign change.
pub fn current_sign_scan(
    ctx: &BandContext,
    e_lo: f64,
    e_hi: f64,
    n_points: usize,
) -> Result<CurrentScan> {
    if n_points < 2 || !(e_lo < e_hi) {
        return Err(Error::ConfigInvalid(
            "scan needs e_lo < e_hi and at least two points".into(),
        ));
    }
    let step = (e_hi - e_lo) / (n_points - 1) as f64;
    let rows: Result<Vec<ScanRow>> = (0..n_points)
        .into_par_iter()
        .map(|i| {
            let e = e_lo + i as f64 * step;
            Ok(ScanRow {
                e,
                c: algebraic_current(ctx, e)?,
            })
        })
        .collect();
    let rows = rows?;
    let e_star_candidate = first_sign_change(&rows, 1e-9);
    Ok(CurrentScan {
        rows,
        e_star_candidate,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CurrentReport {
    pub e: f64,
    pub delta: f64,
    pub c_of_e: f64,
    /// inf of mu_1' over the preimage of [e - delta, e + delta]
    pub lambda_min_over_h: f64,
    /// sup of mu_1' over the same preimage
    pub lambda_max_over_h: f64,
    pub spectral_radius_over_h: f64,
    /// "LEFT" if |lambda_min| >= |lambda_max|, else "RIGHT"
    pub dominant_side: String,
}

fn finite_or_cap(ctx: &BandContext, level: f64, branch: Branch) -> Result<f64> {
    // levels at or above the Landau limit have their preimage capped just
    // below the limit (the derivative is already negligible there)
    let capped = match ctx.band.landau_cap() {
        Some(cap) => level.min(cap - 1e-9),
        None => level,
    };
    let inv = inverse_branch(&ctx.band, &ctx.minimum, ctx.theta1, capped, branch)?;
    inv.value
        .finite()
        .ok_or_else(|| Error::EnergyOutOfRange {
            e: level,
            lo: ctx.theta0(),
            hi: ctx.band.upper_limit(),
        })
}

/// Extremum of f over [a, b]: 33-point dense evaluation plus golden-section
/// refinement when the arg-extremum is interior.
fn dense_extremum(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    maximize: bool,
) -> Result<f64> {
    const N: usize = 33;
    let sign = if maximize { -1.0 } else { 1.0 };
    let step = (b - a) / (N - 1) as f64;
    let mut best = f64::INFINITY;
    let mut best_i = 0usize;
    let mut vals = [0.0f64; N];
    for (i, v) in vals.iter_mut().enumerate() {
        *v = sign * f(a + i as f64 * step)?;
        if *v < best {
            best = *v;
            best_i = i;
        }
    }
    if best_i > 0 && best_i + 1 < N {
        // golden-section refinement on the bracketing triple
        let inv_phi = 0.618_033_988_749_894_8;
        let (mut lo, mut hi) = (a + (best_i - 1) as f64 * step, a + (best_i + 1) as f64 * step);
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let mut f1 = sign * f(x1)?;
        let mut f2 = sign * f(x2)?;
        for _ in 0..40 {
            if hi - lo < 1e-7 * (1.0 + lo.abs()) {
                break;
            }
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - inv_phi * (hi - lo);
                f1 = sign * f(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + inv_phi * (hi - lo);
                f2 = sign * f(x2)?;
            }
        }
        best = best.min(f1.min(f2));
    }
    Ok(sign * best)
}

/// Preimage segments of the level window [lo_level, hi_level] on both
/// branches, as fiber intervals.
fn window_segments(ctx: &BandContext, lo_level: f64, hi_level: f64) -> Result<[(f64, f64); 2]> {
    let left = (
        finite_or_cap(ctx, hi_level, Branch::Left)?,
        finite_or_cap(ctx, lo_level, Branch::Left)?,
    );
    let right = (
        finite_or_cap(ctx, lo_level, Branch::Right)?,
        finite_or_cap(ctx, hi_level, Branch::Right)?,
    );
    Ok([left, right])
}

/// Extrema of mu_1' over the preimage of the energy window [e-delta, e+delta].
pub fn current_window(ctx: &BandContext, e: f64, delta: f64) -> Result<CurrentReport> {
    if !(delta > 0.0) {
        return Err(Error::ConfigInvalid("delta must be positive".into()));
    }
    if e - delta <= ctx.theta0() || e + delta >= ctx.theta1 {
        return Err(Error::EnergyOutOfRange {
            e,
            lo: ctx.theta0() + delta,
            hi: ctx.theta1 - delta,
        });
    }
    let segments = window_segments(ctx, e - delta, e + delta)?;
    let mut lambda_min = f64::INFINITY;
    let mut lambda_max = f64::NEG_INFINITY;
    for &(a, b) in &segments {
        let slope = |xi: f64| Ok(ctx.band.value_at(xi)?.1);
        lambda_min = lambda_min.min(dense_extremum(slope, a, b, false)?);
        lambda_max = lambda_max.max(dense_extremum(slope, a, b, true)?);
    }
    let c_of_e = algebraic_current(ctx, e)?;
    let dominant_side = if lambda_min.abs() >= lambda_max.abs() {
        "LEFT"
    } else {
        "RIGHT"
    };
    Ok(CurrentReport {
        e,
        delta,
        c_of_e,
        lambda_min_over_h: lambda_min,
        lambda_max_over_h: lambda_max,
        spectral_radius_over_h: lambda_min.abs().max(lambda_max.abs()),
        dominant_side: dominant_side.into(),
    })
}

/// inf |mu_1'| over the preimage of [e - d, e + d]; the Mourre constant of
/// the unperturbed fiber family is 2h times this value.
pub fn window_inf_abs_slope(ctx: &BandContext, e: f64, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::ConfigInvalid("window half-width must be positive".into()));
    }
    if e - d <= ctx.theta0() {
        // the preimage would contain the band minimum where mu' vanishes
        return Err(Error::WindowEmpty);
    }
    if e + d >= ctx.theta1 {
        return Err(Error::EnergyOutOfRange {
            e,
            lo: ctx.theta0() + d,
            hi: ctx.theta1 - d,
        });
    }
    let segments = window_segments(ctx, e - d, e + d)?;
    let mut inf = f64::INFINITY;
    for &(a, b) in &segments {
        let abs_slope = |xi: f64| Ok(ctx.band.value_at(xi)?.1.abs());
        inf = inf.min(dense_extremum(abs_slope, a, b, false)?);
    }
    Ok(inf)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AgmonFiber {
    pub xi: f64,
    pub weighted_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AgmonReport {
    pub e: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "C_e")]
    pub c_e: f64,
    /// decay onset sqrt(2 (C_e + K^2 + 1))
    #[serde(rename = "x_eK")]
    pub x_e_k: f64,
    pub sup_weighted_norm: f64,
    pub per_xi: Vec<AgmonFiber>,
}

/// Agmon-weighted norms int e^{Kx} |u_1(xi)|^2 dx over the fibers with
/// mu_1(xi) <= e, and the uniform constants describing their decay.
pub fn agmon_report(ctx: &BandContext, e: f64, k: f64, n_xi: usize) -> Result<AgmonReport> {
    if !(k > 0.0) {
        return Err(Error::ConfigInvalid("Agmon weight K must be positive".into()));
    }
    if n_xi < 2 {
        return Err(Error::ConfigInvalid("need at least two fibers".into()));
    }
    let ceiling = ctx.band.landau_cap().unwrap_or(ctx.theta1);
    if e <= ctx.theta0() || e >= ceiling {
        return Err(Error::EnergyOutOfRange {
            e,
            lo: ctx.theta0(),
            hi: ceiling,
        });
    }
    let xi_lo = finite_or_cap(ctx, e, Branch::Left)?;
    let xi_hi = finite_or_cap(ctx, e, Branch::Right)?;
    let c_e = xi_lo.abs().max(xi_hi.abs());
    let x_e_k = (2.0 * (c_e + k * k + 1.0)).sqrt();

    let step = (xi_hi - xi_lo) / (n_xi - 1) as f64;
    let per_xi: Result<Vec<AgmonFiber>> = (0..n_xi)
        .into_par_iter()
        .map(|i| {
            let xi = xi_lo + i as f64 * step;
            let (pairs, _) = solve_fiber(xi, 1, &ctx.config)?;
            let p = &pairs[0];
            if k * p.domain_length > 700.0 {
                return Err(Error::ConfigInvalid(format!(
                    "Agmon weight overflows: K * L = {:.1}",
                    k * p.domain_length
                )));
            }
            let f: Vec<f64> = p
                .eigenfunction
                .iter()
                .enumerate()
                .map(|(i, &u)| (k * i as f64 * p.dx).exp() * u * u)
                .collect();
            let weighted_norm =
                trapezoid_uniform(&f, p.dx) + 0.5 * p.dx * f[f.len() - 1];
            Ok(AgmonFiber { xi, weighted_norm })
        })
        .collect();
    let per_xi = per_xi?;
    let sup_weighted_norm = per_xi
        .iter()
        .map(|f| f.weighted_norm)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(AgmonReport {
        e,
        k,
        c_e,
        x_e_k,
        sup_weighted_norm,
        per_xi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::{find_minimum, BandFunction, BandSample};

    fn synthetic_ctx(f: impl Fn(f64) -> (f64, f64), lo: f64, hi: f64, n: usize) -> BandContext {
        let samples: Vec<BandSample> = (0..n)
            .map(|i| {
                let xi = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                let (mu, mu_prime) = f(xi);
                BandSample {
                    xi,
                    mu,
                    mu_prime,
                    est_error: 0.0,
                }
            })
            .collect();
        let band = BandFunction::from_samples(1, samples).unwrap();
        let min = find_minimum(&band).unwrap();
        BandContext::from_parts(band, min, 8.0)
    }

    #[test]
    fn symmetric_band_carries_no_current() {
        let ctx = synthetic_ctx(|xi| (xi * xi + 0.3, 2.0 * xi), -2.5, 2.5, 51);
        for e in [0.4, 0.9, 1.7, 3.0] {
            let c = algebraic_current(&ctx, e).unwrap();
            assert!(c.abs() < 1e-9, "c({e}) = {c}");
        }
        let scan = current_sign_scan(&ctx, 0.35, 3.0, 12).unwrap();
        assert!(scan.e_star_candidate.is_none());
    }

    #[test]
    fn window_extrema_on_synthetic_parabola() {
        // mu = (xi-1)^2 + 0.5: preimage of [0.9, 1.1] has slopes
        // [-2 sqrt(0.6), -2 sqrt(0.4)] and mirrored on the right
        let ctx = synthetic_ctx(
            |xi| ((xi - 1.0) * (xi - 1.0) + 0.5, 2.0 * (xi - 1.0)),
            -2.0,
            4.0,
            61,
        );
        let rep = current_window(&ctx, 1.0, 0.1).unwrap();
        let lo = -2.0 * 0.6f64.sqrt();
        let hi = 2.0 * 0.6f64.sqrt();
        assert!((rep.lambda_min_over_h - lo).abs() < 1e-6, "{}", rep.lambda_min_over_h);
        assert!((rep.lambda_max_over_h - hi).abs() < 1e-6);
        assert!((rep.spectral_radius_over_h - hi).abs() < 1e-6);
        assert!(rep.c_of_e.abs() < 1e-9);
    }

    #[test]
    fn window_validation() {
        let ctx = synthetic_ctx(|xi| (xi * xi + 0.3, 2.0 * xi), -2.5, 2.5, 51);
        assert!(matches!(
            current_window(&ctx, 0.31, 0.05),
            Err(Error::EnergyOutOfRange { .. })
        ));
        assert!(matches!(
            window_inf_abs_slope(&ctx, 0.3, 0.05),
            Err(Error::WindowEmpty)
        ));
        let inf = window_inf_abs_slope(&ctx, 1.3, 0.1).unwrap();
        // closest preimage points to the minimum sit at level 1.2
        assert!((inf - 2.0 * 0.9f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn sign_change_detection() {
        let rows = vec![
            ScanRow { e: 0.0, c: -2.0 },
            ScanRow { e: 1.0, c: -1.0 },
            ScanRow { e: 2.0, c: 1.0 },
        ];
        assert_eq!(first_sign_change(&rows, 1e-9), Some(1.5));
        // sub-threshold wiggles are not crossings
        let noisy = vec![
            ScanRow { e: 0.0, c: 1e-12 },
            ScanRow { e: 1.0, c: -1e-12 },
        ];
        assert_eq!(first_sign_change(&noisy, 1e-9), None);
        let flat: Vec<ScanRow> = (0..4)
            .map(|i| ScanRow { e: i as f64, c: -1.0 })
            .collect();
        assert_eq!(first_sign_change(&flat, 1e-9), None);
    }
}
