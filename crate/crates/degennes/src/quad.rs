//! Small quadrature toolbox: trapezoid sums on uniform grids and an adaptive
//! Simpson rule for the smooth universal integrals in the resolvent bounds.

/// Trapezoid rule on a uniform grid with spacing `h`; `f[i]` are samples at
/// x = i*h. Endpoint weights h/2.
pub fn trapezoid_uniform(f: &[f64], h: f64) -> f64 {
    if f.len() < 2 {
        return 0.0;
    }
    let inner: f64 = f[1..f.len() - 1].iter().sum();
    h * (0.5 * f[0] + inner + 0.5 * f[f.len() - 1])
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of a smooth integrand on [a, b].
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Integral of t^{-1/2} over (0,1], evaluated by quadrature after the
/// substitution t = w^2 (integrand becomes the constant 2). Exact value 2.
pub fn int_inv_sqrt() -> f64 {
    adaptive_simpson(|_| 2.0, 0.0, 1.0, 1e-12)
}

/// Integral of |ln t|^{1/2} t^{-1/2} over (0,1], via t = e^{-w^2}:
/// the integrand becomes 2 w^2 e^{-w^2/2} on (0, inf). Exact value sqrt(2 pi).
pub fn int_sqrt_log_inv_sqrt() -> f64 {
    // tail beyond w = 14 is below 1e-40
    adaptive_simpson(|w: f64| 2.0 * w * w * (-0.5 * w * w).exp(), 0.0, 14.0, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_linear_is_exact() {
        let h = 0.1;
        let f: Vec<f64> = (0..=10).map(|i| 3.0 * (i as f64) * h + 1.0).collect();
        assert!((trapezoid_uniform(&f, h) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn simpson_on_gaussian() {
        let v = adaptive_simpson(|x: f64| (-x * x).exp(), -8.0, 8.0, 1e-12);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn universal_integrals() {
        assert!((int_inv_sqrt() - 2.0).abs() < 1e-10);
        let two_pi_sqrt = (2.0 * std::f64::consts::PI).sqrt();
        assert!((int_sqrt_log_inv_sqrt() - two_pi_sqrt).abs() < 1e-10);
    }
}
