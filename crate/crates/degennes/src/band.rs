//! Band functions xi -> mu_j(xi): sampling, interpolation, minima, higher
//! derivatives, and inversion of the two monotone branches around the minimum.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{solve_fiber, DiscretizationConfig};

/// Monotone branch of a band around its minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Left,
    Right,
}

/// Result of inverting a band on one branch. The right branch of band j has
/// supremum 2j-1, approached but not attained: energies at or above it map to
/// the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InverseValue {
    Finite(f64),
    PlusInfinity,
}

impl InverseValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            InverseValue::Finite(x) => Some(x),
            InverseValue::PlusInfinity => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InverseBranchResult {
    pub value: InverseValue,
    pub branch: Branch,
    /// |mu(root) - e| at the returned point (zero for the point at infinity)
    pub residual: f64,
}

/// One band sample: eigenvalue and Feynman-Hellmann derivative at a fiber.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BandSample {
    pub xi: f64,
    pub mu: f64,
    pub mu_prime: f64,
    pub est_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BandSource {
    /// backed by the fiber solver: fresh solves on demand
    Solver,
    /// injected samples: all evaluation goes through the interpolant
    Injected,
}

/// A sampled band function with a C1 cubic-Hermite interpolant.
#[derive(Debug, Clone)]
pub struct BandFunction {
    pub band_index: usize,
    pub samples: Vec<BandSample>,
    pub config: DiscretizationConfig,
    source: BandSource,
}

/// Located band minimum with derivative information.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BandMinimum {
    pub xi_star: f64,
    /// mu_j(xi_star)
    pub theta: f64,
    /// residual |mu'| at the located minimum
    pub mu_prime_at_min: f64,
    pub second_derivative: f64,
    pub third_derivative: f64,
    pub second_error_bar: f64,
    pub third_error_bar: f64,
}

/// Central-difference estimates of mu'', mu''' with error bars.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DerivativeEstimates {
    pub first: f64,
    pub second: f64,
    pub third: f64,
    pub first_error_bar: f64,
    pub second_error_bar: f64,
    pub third_error_bar: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    /// distance to the failure boundary (positive iff passed)
    pub margin: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl BandFunction {
    /// Build a band from externally supplied samples. Evaluation (including
    /// "fresh" evaluation during root-finding) goes through the interpolant.
    pub fn from_samples(band_index: usize, samples: Vec<BandSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::ConfigInvalid("need at least two band samples".into()));
        }
        if samples.windows(2).any(|w| w[1].xi <= w[0].xi) {
            return Err(Error::ConfigInvalid(
                "band samples must have strictly increasing fibers".into(),
            ));
        }
        Ok(BandFunction {
            band_index,
            samples,
            config: DiscretizationConfig::default(),
            source: BandSource::Injected,
        })
    }

    pub fn xi_range(&self) -> (f64, f64) {
        (self.samples[0].xi, self.samples[self.samples.len() - 1].xi)
    }

    fn segment(&self, xi: f64) -> usize {
        // clamp to the boundary segments; out-of-range evaluation extrapolates
        let s = &self.samples;
        match s.binary_search_by(|p| p.xi.partial_cmp(&xi).unwrap()) {
            Ok(i) => i.min(s.len() - 2),
            Err(i) => i.saturating_sub(1).min(s.len() - 2),
        }
    }

    /// Interpolated mu_j(xi) (cubic Hermite through the (mu, mu') samples).
    pub fn eval(&self, xi: f64) -> f64 {
        let i = self.segment(xi);
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let dx = b.xi - a.xi;
        let t = (xi - a.xi) / dx;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * a.mu
            + (t3 - 2.0 * t2 + t) * dx * a.mu_prime
            + (-2.0 * t3 + 3.0 * t2) * b.mu
            + (t3 - t2) * dx * b.mu_prime
    }

    /// Derivative of the interpolant.
    pub fn eval_prime(&self, xi: f64) -> f64 {
        let i = self.segment(xi);
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let dx = b.xi - a.xi;
        let t = (xi - a.xi) / dx;
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * a.mu
            + (3.0 * t2 - 4.0 * t + 1.0) * dx * a.mu_prime
            + (-6.0 * t2 + 6.0 * t) * b.mu
            + (3.0 * t2 - 2.0 * t) * dx * b.mu_prime)
            / dx
    }

    /// Evaluate (mu, mu', est_mu_err, est_mu'_err) at an arbitrary fiber:
    /// a fresh solve for solver-backed bands, the interpolant otherwise.
    pub fn value_at(&self, xi: f64) -> Result<(f64, f64, f64, f64)> {
        match self.source {
            BandSource::Injected => Ok((self.eval(xi), self.eval_prime(xi), 0.0, 0.0)),
            BandSource::Solver => {
                let (pairs, _) = solve_fiber(xi, self.band_index, &self.config)?;
                let p = &pairs[self.band_index - 1];
                Ok((p.mu, p.mu_prime, p.est_mu_error, p.est_mu_prime_error))
            }
        }
    }

    /// Supremum of the band as xi -> +inf (the Landau level 2j - 1).
    pub fn upper_limit(&self) -> f64 {
        (2 * self.band_index - 1) as f64
    }

    /// The Landau-level ceiling, if this band has one (injected synthetic
    /// bands are not constrained by it).
    pub fn landau_cap(&self) -> Option<f64> {
        match self.source {
            BandSource::Solver => Some(self.upper_limit()),
            BandSource::Injected => None,
        }
    }

    /// CSV rows: band_index,xi,mu,mu_prime,est_error (17 significant digits).
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "band_index,xi,mu,mu_prime,est_error")?;
        for s in &self.samples {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.band_index,
                crate::report::fmt17(s.xi),
                crate::report::fmt17(s.mu),
                crate::report::fmt17(s.mu_prime),
                crate::report::fmt17(s.est_error)
            )?;
        }
        Ok(())
    }
}

/// Sample band j on a uniform fiber grid (parallel over fibers, output in
/// fiber order regardless of scheduling).
pub fn sample_band(
    band_index: usize,
    xi_lo: f64,
    xi_hi: f64,
    n_samples: usize,
    config: &DiscretizationConfig,
) -> Result<BandFunction> {
    config.validate()?;
    if band_index == 0 {
        return Err(Error::ConfigInvalid("band_index is 1-based".into()));
    }
    if !(xi_lo < xi_hi) || n_samples < 2 {
        return Err(Error::ConfigInvalid(
            "need xi_lo < xi_hi and at least two samples".into(),
        ));
    }
    let step = (xi_hi - xi_lo) / (n_samples - 1) as f64;
    let samples: Result<Vec<BandSample>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let xi = xi_lo + i as f64 * step;
            let (pairs, _) = solve_fiber(xi, band_index, config)?;
            let p = &pairs[band_index - 1];
            Ok(BandSample {
                xi,
                mu: p.mu,
                mu_prime: p.mu_prime,
                est_error: p.est_mu_error,
            })
        })
        .collect();
    Ok(BandFunction {
        band_index,
        samples: samples?,
        config: config.clone(),
        source: BandSource::Solver,
    })
}

/// Locate the unique minimum of a band: bracket from the sampled derivative
/// signs, then root-find on mu' with fresh evaluations.
pub fn find_minimum(band: &BandFunction) -> Result<BandMinimum> {
    let s = &band.samples;
    let mut bracket = None;
    for w in s.windows(2) {
        if w[0].mu_prime < 0.0 && w[1].mu_prime >= 0.0 {
            bracket = Some((w[0].xi, w[1].xi));
            break;
        }
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::NoBracket)?;
    let mut glo = band.value_at(lo)?.1;
    let mut ghi = band.value_at(hi)?.1;
    if glo >= 0.0 || ghi < 0.0 {
        return Err(Error::NoBracket);
    }
    let mut root = 0.5 * (lo + hi);
    let mut groot;
    for _ in 0..200 {
        // secant proposal, safeguarded by the bracket
        let sec = lo - glo * (hi - lo) / (ghi - glo);
        let mid = 0.5 * (lo + hi);
        let c = if sec.is_finite() && sec > lo && sec < hi {
            // alternate toward bisection to guarantee progress
            0.7 * sec + 0.3 * mid
        } else {
            mid
        };
        groot = band.value_at(c)?.1;
        root = c;
        if groot.abs() < 1e-10 {
            break;
        }
        if groot < 0.0 {
            lo = c;
            glo = groot;
        } else {
            hi = c;
            ghi = groot;
        }
        if hi - lo < 1e-13 * (1.0 + c.abs()) {
            root = 0.5 * (lo + hi);
            break;
        }
    }
    let (theta, g_final, _, _) = band.value_at(root)?;
    let d = derivatives_at(band, root, 1e-2)?;
    Ok(BandMinimum {
        xi_star: root,
        theta,
        mu_prime_at_min: g_final.abs(),
        second_derivative: d.second,
        third_derivative: d.third,
        second_error_bar: d.second_error_bar,
        third_error_bar: d.third_error_bar,
    })
}

/// Central differences of the Feynman-Hellmann derivative, Richardson
/// extrapolated over steps {2s, s, s/2}. Error bars carry both the
/// extrapolation tail and the propagated eigensolver noise.
pub fn derivatives_at(band: &BandFunction, xi: f64, step: f64) -> Result<DerivativeEstimates> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::ConfigInvalid("derivative step must be positive".into()));
    }
    let s = step;
    // evaluation points: 0, +-s/2, +-s, +-2s
    let offsets = [-2.0 * s, -s, -0.5 * s, 0.0, 0.5 * s, s, 2.0 * s];
    let vals: Result<Vec<(f64, f64, f64, f64)>> = offsets
        .par_iter()
        .map(|&d| band.value_at(xi + d))
        .collect();
    let vals = vals?;
    let g = |i: usize| vals[i].1; // mu' at offsets[i]
    let noise = vals
        .iter()
        .map(|v| v.3)
        .fold(0.0f64, f64::max)
        .max(f64::EPSILON * (1.0 + g(3).abs()));

    // a step below 100x the realized eigenvalue tolerance would make the
    // stencil pure noise; larger noise merely inflates the error bars
    let floor = 100.0 * noise;
    if s < floor {
        return Err(Error::StepUnderflow { step: s, floor });
    }

    // D2(sigma) = (g(+sigma) - g(-sigma)) / (2 sigma)
    let d2 = |gp: f64, gm: f64, sigma: f64| (gp - gm) / (2.0 * sigma);
    // D3(sigma) = (g(+sigma) - 2 g(0) + g(-sigma)) / sigma^2
    let d3 = |gp: f64, gm: f64, sigma: f64| (gp - 2.0 * g(3) + gm) / (sigma * sigma);

    let extrapolate = |v2s: f64, vs: f64, vs2: f64| {
        let r1 = (4.0 * vs - v2s) / 3.0;
        let r1b = (4.0 * vs2 - vs) / 3.0;
        let r2 = (16.0 * r1b - r1) / 15.0;
        (r2, 2.0 * (r2 - r1b).abs())
    };

    let (second, tail2) = extrapolate(
        d2(g(6), g(0), 2.0 * s),
        d2(g(5), g(1), s),
        d2(g(4), g(2), 0.5 * s),
    );
    let (third, tail3) = extrapolate(
        d3(g(6), g(0), 2.0 * s),
        d3(g(5), g(1), s),
        d3(g(4), g(2), 0.5 * s),
    );

    Ok(DerivativeEstimates {
        first: g(3),
        second,
        third,
        first_error_bar: noise,
        second_error_bar: tail2 + 4.0 * noise / s,
        third_error_bar: tail3 + 16.0 * noise / (s * s),
        step: s,
    })
}

/// Invert a band on one monotone branch: find xi on the given side of the
/// minimum with mu_j(xi) = e.
pub fn inverse_branch(
    band: &BandFunction,
    minimum: &BandMinimum,
    upper_range: f64,
    e: f64,
    branch: Branch,
) -> Result<InverseBranchResult> {
    let theta = minimum.theta;
    if e < theta - 1e-11 || e >= upper_range {
        return Err(Error::EnergyOutOfRange {
            e,
            lo: theta,
            hi: upper_range,
        });
    }
    if (e - theta).abs() <= 1e-11 {
        return Ok(InverseBranchResult {
            value: InverseValue::Finite(minimum.xi_star),
            branch,
            residual: 0.0,
        });
    }
    if branch == Branch::Right && band.source == BandSource::Solver && e >= band.upper_limit() {
        // the right branch increases to 2j-1 without attaining it
        return Ok(InverseBranchResult {
            value: InverseValue::PlusInfinity,
            branch,
            residual: 0.0,
        });
    }

    // bracket the level e on the requested side
    let f = |xi: f64| -> Result<f64> { Ok(band.value_at(xi)?.0 - e) };
    let (mut lo, mut hi) = match branch {
        Branch::Left => {
            let mut a = minimum.xi_star - 0.5;
            let mut steps = 0;
            while f(a)? < 0.0 {
                a -= 0.5;
                steps += 1;
                if steps > 100 {
                    return Err(Error::NoBracket);
                }
            }
            (a, minimum.xi_star)
        }
        Branch::Right => {
            let mut b = minimum.xi_star + 0.5;
            let mut steps = 0;
            while f(b)? < 0.0 {
                b += 1.0;
                steps += 1;
                if steps > 60 {
                    return Err(Error::NoBracket);
                }
            }
            (minimum.xi_star, b)
        }
    };
    // on [lo, hi] the level function changes sign exactly once; for the left
    // branch f(lo) >= 0 >= f(hi), for the right f(lo) <= 0 <= f(hi)
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    let increasing = fhi >= flo;
    let mut root = 0.5 * (lo + hi);
    let mut fr = f(root)?;
    for _ in 0..200 {
        if fr.abs() < 5e-12 || hi - lo < 1e-12 * (1.0 + root.abs()) {
            break;
        }
        let below = if increasing { fr < 0.0 } else { fr > 0.0 };
        if below {
            lo = root;
            flo = fr;
        } else {
            hi = root;
            fhi = fr;
        }
        let sec = lo - flo * (hi - lo) / (fhi - flo);
        let mid = 0.5 * (lo + hi);
        root = if sec.is_finite() && sec > lo && sec < hi {
            0.7 * sec + 0.3 * mid
        } else {
            mid
        };
        fr = f(root)?;
    }
    Ok(InverseBranchResult {
        value: InverseValue::Finite(root),
        branch,
        residual: fr.abs(),
    })
}

/// Structural checks on a family of sampled bands: unique non-degenerate
/// minimum, monotone branches, theta = xi_star^2, the Landau-level limit, and
/// interlacing bounds on the minima.
pub fn check_rappel(bands: &[BandFunction]) -> Result<PropertyReport> {
    let mut checks = Vec::new();
    for band in bands {
        let j = band.band_index;
        let tag = |name: &str| format!("band{j}_{name}");

        // sign pattern of the sampled derivative
        let tol = 1e-9;
        let mut transitions = 0usize;
        let mut bad = 0usize;
        let mut last_sign = 0i32;
        for s in &band.samples {
            let sign = if s.mu_prime > tol {
                1
            } else if s.mu_prime < -tol {
                -1
            } else {
                0
            };
            if sign != 0 {
                if last_sign == -1 && sign == 1 {
                    transitions += 1;
                } else if last_sign == 1 && sign == -1 {
                    bad += 1;
                }
                last_sign = sign;
            }
        }
        let mono_ok = transitions == 1 && bad == 0;
        checks.push(PropertyCheck {
            name: tag("single_minimum_monotone_branches"),
            passed: mono_ok,
            margin: if mono_ok { 1.0 } else { -(bad as f64 + transitions.abs_diff(1) as f64) },
            detail: format!("{transitions} down-up transition(s), {bad} up-down"),
        });
        if !mono_ok {
            continue; // a minimum cannot be certified
        }

        let min = find_minimum(band)?;
        let nondeg = min.second_derivative - min.second_error_bar;
        checks.push(PropertyCheck {
            name: tag("nondegenerate_minimum"),
            passed: nondeg > 0.0,
            margin: nondeg,
            detail: format!(
                "mu'' = {:.6} +- {:.1e} at xi* = {:.8}",
                min.second_derivative, min.second_error_bar, min.xi_star
            ),
        });

        let dev = (min.theta - min.xi_star * min.xi_star).abs();
        checks.push(PropertyCheck {
            name: tag("theta_equals_xi_star_squared"),
            passed: dev < 1e-6,
            margin: 1e-6 - dev,
            detail: format!("|theta - xi*^2| = {dev:.3e}"),
        });

        let last = band.samples.last().unwrap();
        let limit = band.upper_limit();
        let ldev = (last.mu - limit).abs();
        checks.push(PropertyCheck {
            name: tag("landau_level_limit"),
            passed: ldev < 1e-3,
            margin: 1e-3 - ldev,
            detail: format!("|mu_{j}({:.2}) - {limit}| = {ldev:.3e}", last.xi),
        });

        let lower = if j == 1 { 0.0 } else { (2 * j - 3) as f64 };
        let margin = (min.theta - lower).min(limit - min.theta);
        checks.push(PropertyCheck {
            name: tag("theta_interlacing"),
            passed: margin > 0.0,
            margin,
            detail: format!("theta_{} = {:.8} in ({lower}, {limit})", j - 1, min.theta),
        });
    }
    Ok(PropertyReport { checks })
}

/// Band 1 plus the quantities every downstream analysis needs: its minimum
/// (xi_0, theta_0) and the bottom theta_1 of band 2.
#[derive(Debug, Clone)]
pub struct BandContext {
    pub band: BandFunction,
    pub minimum: BandMinimum,
    pub theta1: f64,
    pub config: DiscretizationConfig,
}

impl BandContext {
    pub fn build(config: &DiscretizationConfig) -> Result<Self> {
        let band = sample_band(1, -1.0, 6.0, 141, config)?;
        let minimum = find_minimum(&band)?;
        let band2 = sample_band(2, 0.5, 3.0, 51, config)?;
        let min2 = find_minimum(&band2)?;
        Ok(BandContext {
            band,
            minimum,
            theta1: min2.theta,
            config: config.clone(),
        })
    }

    /// Assemble from precomputed parts (synthetic bands in tests).
    pub fn from_parts(band: BandFunction, minimum: BandMinimum, theta1: f64) -> Self {
        let config = band.config.clone();
        BandContext {
            band,
            minimum,
            theta1,
            config,
        }
    }

    pub fn theta0(&self) -> f64 {
        self.minimum.theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Injected parabola mu(xi) = (xi - 1)^2 + 0.5 sampled on [-1, 3].
    fn parabola() -> BandFunction {
        let samples: Vec<BandSample> = (0..=40)
            .map(|i| {
                let xi = -1.0 + 0.1 * i as f64;
                BandSample {
                    xi,
                    mu: (xi - 1.0) * (xi - 1.0) + 0.5,
                    mu_prime: 2.0 * (xi - 1.0),
                    est_error: 0.0,
                }
            })
            .collect();
        BandFunction::from_samples(1, samples).unwrap()
    }

    #[test]
    fn synthetic_minimum_is_exact() {
        let band = parabola();
        let min = find_minimum(&band).unwrap();
        assert!((min.xi_star - 1.0).abs() < 1e-9);
        assert!((min.theta - 0.5).abs() < 1e-12);
        assert!((min.second_derivative - 2.0).abs() < 1e-9);
        assert!(min.third_derivative.abs() < 1e-8);
    }

    #[test]
    fn synthetic_inverse_both_branches() {
        let band = parabola();
        let min = find_minimum(&band).unwrap();
        let l = inverse_branch(&band, &min, 10.0, 1.5, Branch::Left).unwrap();
        let r = inverse_branch(&band, &min, 10.0, 1.5, Branch::Right).unwrap();
        assert!((l.value.finite().unwrap() - 0.0).abs() < 1e-9);
        assert!((r.value.finite().unwrap() - 2.0).abs() < 1e-9);
        assert!(l.residual < 1e-10 && r.residual < 1e-10);
    }

    #[test]
    fn inverse_rejects_out_of_range() {
        let band = parabola();
        let min = find_minimum(&band).unwrap();
        assert!(matches!(
            inverse_branch(&band, &min, 10.0, 0.4, Branch::Left),
            Err(Error::EnergyOutOfRange { .. })
        ));
        assert!(matches!(
            inverse_branch(&band, &min, 2.0, 2.5, Branch::Right),
            Err(Error::EnergyOutOfRange { .. })
        ));
    }

    #[test]
    fn inverse_at_the_minimum_is_xi_star() {
        let band = parabola();
        let min = find_minimum(&band).unwrap();
        let r = inverse_branch(&band, &min, 10.0, 0.5, Branch::Right).unwrap();
        assert_eq!(r.value.finite().unwrap(), min.xi_star);
    }

    #[test]
    fn no_bracket_without_sign_change() {
        // strictly decreasing synthetic band
        let samples: Vec<BandSample> = (0..=20)
            .map(|i| {
                let xi = 0.1 * i as f64;
                BandSample {
                    xi,
                    mu: 3.0 - xi,
                    mu_prime: -1.0,
                    est_error: 0.0,
                }
            })
            .collect();
        let band = BandFunction::from_samples(1, samples).unwrap();
        assert!(matches!(find_minimum(&band), Err(Error::NoBracket)));
    }

    #[test]
    fn wiggly_band_fails_monotonicity_check() {
        let samples: Vec<BandSample> = (0..=60)
            .map(|i| {
                let xi = 0.1 * i as f64;
                BandSample {
                    xi,
                    mu: (xi - 3.0) * (xi - 3.0) + 0.8 * (4.0 * xi).sin(),
                    mu_prime: 2.0 * (xi - 3.0) + 3.2 * (4.0 * xi).cos(),
                    est_error: 0.0,
                }
            })
            .collect();
        let band = BandFunction::from_samples(1, samples).unwrap();
        let report = check_rappel(&[band]).unwrap();
        assert!(!report.all_passed());
        assert!(!report.checks[0].passed);
    }

    #[test]
    fn from_samples_rejects_unsorted() {
        let s = vec![
            BandSample { xi: 0.0, mu: 1.0, mu_prime: 0.0, est_error: 0.0 },
            BandSample { xi: 0.0, mu: 1.0, mu_prime: 0.0, est_error: 0.0 },
        ];
        assert!(BandFunction::from_samples(1, s).is_err());
    }

    #[test]
    fn step_underflow_reported() {
        // solver-backed band via a tiny sampled stretch; the propagated noise
        // floor makes a 1e-7 step meaningless
        let cfg = DiscretizationConfig::default();
        let band = sample_band(1, 0.7, 0.9, 3, &cfg).unwrap();
        assert!(matches!(
            derivatives_at(&band, 0.8, 1e-10),
            Err(Error::StepUnderflow { .. })
        ));
    }
}
