//! Shared fixtures for the integration suites: an independent single-grid
//! oracle for the first band, lazily built shared contexts, and the
//! bookkeeping used by the whole-suite runtime criterion.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;
use std::time::Instant;

use degennes::{check_rappel, sample_band, BandContext, BandFunction, DiscretizationConfig};

/// First access pins the suite start; every criterion calls this on entry.
pub fn suite_start() -> Instant {
    static START: OnceLock<Instant> = OnceLock::new();
    *START.get_or_init(Instant::now)
}

pub static CRITERIA_DONE: AtomicUsize = AtomicUsize::new(0);

/// RAII token: counts a criterion as finished even if it panics.
pub struct Counted;

impl Drop for Counted {
    fn drop(&mut self) {
        CRITERIA_DONE.fetch_add(1, Ordering::SeqCst);
    }
}

pub fn counted() -> Counted {
    suite_start();
    Counted
}

/// Band 1 context at the default configuration, shared across criteria.
pub fn shared_context() -> &'static BandContext {
    static CTX: OnceLock<BandContext> = OnceLock::new();
    CTX.get_or_init(|| {
        BandContext::build(&DiscretizationConfig::default()).expect("default context builds")
    })
}

/// Bands 1..=3 over [-1, 6] plus their property report.
pub fn shared_bands() -> &'static (Vec<BandFunction>, degennes::band::PropertyReport) {
    static BANDS: OnceLock<(Vec<BandFunction>, degennes::band::PropertyReport)> = OnceLock::new();
    BANDS.get_or_init(|| {
        let cfg = DiscretizationConfig::default();
        let bands: Vec<BandFunction> = (1..=3)
            .map(|j| sample_band(j, -1.0, 6.0, 141, &cfg).expect("band samples"))
            .collect();
        let report = check_rappel(&bands).expect("property checks run");
        (bands, report)
    })
}

/// One pass/fail line per criterion; panics on failure after printing.
pub fn criterion(n: usize, name: &str, passed: bool, detail: &str) {
    let status = if passed { "PASS" } else { "FAIL" };
    println!("criterion {n}: {status} - {name}: {detail}");
    assert!(passed, "criterion {n} ({name}) failed: {detail}");
}

// ---------------------------------------------------------------------------
// Independent oracle: one fixed dense grid (no extrapolation ladder), inverse
// power iteration for the lowest eigenvalue, golden-section minimization over
// xi. Shares no code with the library solver.

const ORACLE_N: usize = 8000;
const ORACLE_L: f64 = 20.0;

/// Lowest eigenvalue of the half-line operator -u'' + (xi - x)^2 u with a
/// Neumann wall at 0, discretized once on a dense uniform grid.
pub fn oracle_mu1(xi: f64) -> f64 {
    let n = ORACLE_N;
    let h = ORACLE_L / n as f64;
    let inv_h2 = 1.0 / (h * h);
    // symmetrized Neumann ghost point at 0, Dirichlet at L
    let mut diag: Vec<f64> = (0..n)
        .map(|i| {
            let x = i as f64 * h;
            let t = xi - x;
            2.0 * inv_h2 + t * t
        })
        .collect();
    let mut off = vec![-inv_h2; n - 1];
    off[0] = -std::f64::consts::SQRT_2 * inv_h2;

    // inverse power iteration with a fixed shift below the band
    let sigma = 0.4;
    for d in diag.iter_mut() {
        *d -= sigma;
    }
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
    let mut lambda = sigma;
    for _ in 0..60 {
        let w = thomas_solve(&diag, &off, &v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let vn: Vec<f64> = w.iter().map(|x| x / norm).collect();
        // Rayleigh quotient of the shifted matrix
        let mut num = 0.0;
        for i in 0..n {
            let mut av = diag[i] * vn[i];
            if i > 0 {
                av += off[i - 1] * vn[i - 1];
            }
            if i + 1 < n {
                av += off[i] * vn[i + 1];
            }
            num += vn[i] * av;
        }
        let new_lambda = sigma + num;
        let done = (new_lambda - lambda).abs() < 1e-14 * (1.0 + new_lambda.abs());
        lambda = new_lambda;
        v = vn;
        if done {
            break;
        }
    }
    lambda
}

/// Thomas algorithm for a symmetric tridiagonal system (diagonally dominant
/// here, so no pivoting is needed).
fn thomas_solve(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = off[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - off[i - 1] * c[i - 1];
        if i < n - 1 {
            c[i] = off[i] / m;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Golden-section minimization of the oracle band over [0.6, 0.9].
pub fn oracle_minimum() -> (f64, f64) {
    static MIN: OnceLock<(f64, f64)> = OnceLock::new();
    *MIN.get_or_init(|| {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (0.6, 0.9);
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = oracle_mu1(x1);
        let mut f2 = oracle_mu1(x2);
        while b - a > 1e-10 {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = oracle_mu1(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = oracle_mu1(x2);
            }
        }
        let xi = 0.5 * (a + b);
        (xi, oracle_mu1(xi))
    })
}
