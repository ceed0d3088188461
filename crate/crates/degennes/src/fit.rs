//! Least-squares line fits, used for the scaling audit and slope checks.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// max absolute residual of the fit
    pub max_residual: f64,
}

/// Ordinary least squares y = slope*x + intercept.
pub fn line_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::ConfigInvalid(
            "line fit needs at least two (x, y) pairs".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&u, &v)| (u - mx) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(Error::ConfigInvalid("degenerate abscissae in line fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = x
        .iter()
        .zip(y)
        .map(|(&u, &v)| (v - slope * u - intercept).abs())
        .fold(0.0f64, f64::max);
    Ok(LineFit {
        slope,
        intercept,
        max_residual,
    })
}

/// Least-squares slope of a line constrained through the origin.
pub fn slope_through_origin(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::ConfigInvalid("empty data in slope fit".into()));
    }
    let sxx: f64 = x.iter().map(|&v| v * v).sum();
    if sxx == 0.0 {
        return Err(Error::ConfigInvalid("degenerate abscissae in slope fit".into()));
    }
    Ok(x.iter().zip(y).map(|(&u, &v)| u * v).sum::<f64>() / sxx)
}

/// Power-law fit y = C * x^p via a line fit in log-log coordinates.
/// All data must be strictly positive in magnitude; the sign of y must not
/// change across the sample.
pub fn power_law_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.iter().any(|&v| v <= 0.0) {
        return Err(Error::ConfigInvalid("power-law fit needs x > 0".into()));
    }
    let pos = y.iter().filter(|&&v| v > 0.0).count();
    if pos != 0 && pos != y.len() {
        return Err(Error::FitUnstable { residual: f64::INFINITY });
    }
    if y.contains(&0.0) {
        return Err(Error::FitUnstable { residual: f64::INFINITY });
    }
    let lx: Vec<f64> = x.iter().map(|&v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|&v| v.abs().ln()).collect();
    line_fit(&lx, &ly)
}
