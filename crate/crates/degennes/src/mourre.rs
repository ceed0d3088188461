//! Explicit Mourre theory: the constants ledger of the abstract
//! limiting-absorption argument, the resolvent bound assembled from it, the
//! semiclassical spectral window, and a numerical audit of the predicted
//! h-scaling exponents.

use num_rational::Ratio;
use serde::Serialize;

use crate::band::BandContext;
use crate::current::window_inf_abs_slope;
use crate::error::{Error, Result};
use crate::fit::power_law_fit;
use crate::quad::{int_inv_sqrt, int_sqrt_log_inv_sqrt};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// sup over the interval of |l + i| = sqrt(l^2 + 1) (attained at an endpoint)
    fn sup_abs_plus_i(&self) -> f64 {
        let m = self.lo.abs().max(self.hi.abs());
        (m * m + 1.0).sqrt()
    }
}

/// Hypotheses of the abstract Mourre estimate: commutator lower bound c0 on
/// the window I, first and second commutator norms c1, c2, the larger
/// interval J, and the height M of the complex strip B = I x (0, M].
#[derive(Debug, Clone, Serialize)]
pub struct MourreHypotheses {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub interval_i: Interval,
    pub interval_j: Interval,
    pub strip_height: f64,
}

impl MourreHypotheses {
    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0) {
            return Err(Error::ConstraintViolated("c0 > 0".into()));
        }
        if self.c1 < 0.0 || self.c2 < 0.0 {
            return Err(Error::ConstraintViolated("c1 >= 0 and c2 >= 0".into()));
        }
        if !(self.strip_height > 0.0) {
            return Err(Error::ConstraintViolated("M > 0".into()));
        }
        let (i, j) = (&self.interval_i, &self.interval_j);
        if !(i.lo < i.hi) || !(j.lo < j.hi) {
            return Err(Error::ConstraintViolated("intervals must be nonempty".into()));
        }
        if !(i.lo > j.lo && i.hi < j.hi) {
            return Err(Error::ConstraintViolated(
                "I must be strictly inside J".into(),
            ));
        }
        Ok(())
    }
}

/// Every derived constant of the limiting-absorption argument, evaluated from
/// the hypotheses with no hidden slack.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsLedger {
    pub hypotheses: MourreHypotheses,
    /// sup over J of |l + i|
    pub sup_j: f64,
    /// sup over the strip B of |z + i|
    pub sup_b: f64,
    /// dist(I, complement of J)
    pub dist_i_jc: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub eps0: f64,
    #[serde(rename = "c0_tilde")]
    pub tilde_c0: f64,
    /// quadrature value of int_0^1 t^{-1/2} dt (exactly 2)
    pub int_t_inv_sqrt: f64,
    /// quadrature value of int_0^1 |ln t|^{1/2} t^{-1/2} dt (exactly sqrt(2 pi))
    pub int_sqrt_log: f64,
}

impl ConstantsLedger {
    /// C(eps, z) = (1 - c1 eps (1 + |z+i|/dist)) / (1 + |z+i|/dist)
    pub fn c_of(&self, eps: f64, z: (f64, f64)) -> f64 {
        let (re, im) = z;
        let abs_zi = (re * re + (im + 1.0) * (im + 1.0)).sqrt();
        let den = 1.0 + abs_zi / self.dist_i_jc;
        (1.0 - self.hypotheses.c1 * eps * den) / den
    }

    /// D1(eps, z) = (Im z + c0 eps - (c1 eps)^2 sup_J / C) / (1 + c1 eps / C)
    pub fn d1(&self, eps: f64, z: (f64, f64)) -> f64 {
        let c = self.c_of(eps, z);
        let h = &self.hypotheses;
        (z.1 + h.c0 * eps - (h.c1 * eps) * (h.c1 * eps) * self.sup_j / c)
            / (1.0 + h.c1 * eps / c)
    }

    /// D2(eps, z) = C / (1 + c1 eps sup_J / D1)
    pub fn d2(&self, eps: f64, z: (f64, f64)) -> f64 {
        let c = self.c_of(eps, z);
        let d1 = self.d1(eps, z);
        c / (1.0 + self.hypotheses.c1 * eps * self.sup_j / d1)
    }

    /// D3(eps, z) = min(D1 / sup_J, D2) / sqrt(2)
    pub fn d3(&self, eps: f64, z: (f64, f64)) -> f64 {
        (self.d1(eps, z) / self.sup_j).min(self.d2(eps, z)) / std::f64::consts::SQRT_2
    }

    /// Tabulate C, D1, D2, D3 on a grid of (eps, z) with eps in (0, eps0] and
    /// z ranging over the strip B = I x (0, M].
    pub fn sample_chain(&self, n_eps: usize, n_im: usize) -> Vec<ChainSample> {
        let i = &self.hypotheses.interval_i;
        let res = [i.lo, 0.5 * (i.lo + i.hi), i.hi];
        let eps_cap = if self.eps0.is_finite() { self.eps0 } else { 1.0 };
        let mut out = Vec::with_capacity(n_eps * n_im * res.len());
        for ke in 1..=n_eps {
            let eps = eps_cap * ke as f64 / n_eps as f64;
            for &re in &res {
                for km in 1..=n_im {
                    let im = self.hypotheses.strip_height * km as f64 / n_im as f64;
                    let z = (re, im);
                    out.push(ChainSample {
                        eps,
                        z_re: re,
                        z_im: im,
                        c: self.c_of(eps, z),
                        d1: self.d1(eps, z),
                        d2: self.d2(eps, z),
                        d3: self.d3(eps, z),
                    });
                }
            }
        }
        out
    }
}

/// One sampled point of the estimate chain C -> D1 -> D2 -> D3.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChainSample {
    pub eps: f64,
    pub z_re: f64,
    pub z_im: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "D1")]
    pub d1: f64,
    #[serde(rename = "D2")]
    pub d2: f64,
    #[serde(rename = "D3")]
    pub d3: f64,
}

/// Evaluate the full ledger from the hypotheses.
pub fn ledger(hyp: &MourreHypotheses) -> Result<ConstantsLedger> {
    hyp.validate()?;
    let sup_j = hyp.interval_j.sup_abs_plus_i();
    // the strip B sits above the inner window I
    let xmax = hyp.interval_i.lo.abs().max(hyp.interval_i.hi.abs());
    let m1 = hyp.strip_height + 1.0;
    let sup_b = (xmax * xmax + m1 * m1).sqrt();
    let dist = (hyp.interval_i.lo - hyp.interval_j.lo).min(hyp.interval_j.hi - hyp.interval_i.hi);
    let factor = 1.0 / (sup_b / dist + 1.0);

    let eps1 = if hyp.c1 == 0.0 {
        f64::INFINITY
    } else {
        factor * (hyp.c0 / (4.0 * hyp.c1 * hyp.c1 * sup_j)).min(1.0 / (2.0 * hyp.c1))
    };
    let amp = 1.0 + 4.0 * hyp.c1 * sup_j / hyp.c0;
    let eps0 = eps1.min(2.0 * sup_j / (hyp.c0 * (sup_b / dist + 1.0) * amp));
    let tilde_c0 =
        0.5 * hyp.c0 / (1.0 + 2.0 * amp * (sup_b / dist + 1.0) + 4.0 * hyp.c1 / hyp.c0);

    let mut led = ConstantsLedger {
        hypotheses: hyp.clone(),
        sup_j,
        sup_b,
        dist_i_jc: dist,
        eps1,
        eps2: f64::INFINITY,
        eps0,
        tilde_c0,
        int_t_inv_sqrt: int_inv_sqrt(),
        int_sqrt_log: int_sqrt_log_inv_sqrt(),
    };

    // eps2: conservative minimum over admissible eps at the worst point of the
    // strip (largest |z + i|, where C is smallest)
    let z_worst = (
        if hyp.interval_i.lo.abs() > hyp.interval_i.hi.abs() {
            hyp.interval_i.lo
        } else {
            hyp.interval_i.hi
        },
        hyp.strip_height,
    );
    let eps_cap = if eps1.is_finite() { eps1 } else { 1.0 };
    let mut eps2 = eps1;
    for k in 1..=64 {
        let eps = eps_cap * k as f64 / 64.0;
        let c = led.c_of(eps, z_worst);
        let d2 = led.d2(eps, (z_worst.0, 0.0));
        let first = if hyp.c1 == 0.0 {
            f64::INFINITY
        } else {
            hyp.c0 * sup_j / (2.0 * hyp.c1 * hyp.c1 * c)
        };
        eps2 = eps2.min(first).min(2.0 * d2 * d2 / hyp.c0);
    }
    led.eps2 = eps2;
    Ok(led)
}

/// Inputs of the resolvent bound; `tilde_c0` is the Mourre constant of the
/// conjugate-operator calculus (the abstract floor from the ledger, or the
/// concrete unperturbed constant when one is available).
#[derive(Debug, Clone, Serialize)]
pub struct LapInputs {
    pub c0: f64,
    pub tilde_c0: f64,
    pub sup_j: f64,
    pub eps0: f64,
    pub c2: f64,
    pub norm_c: f64,
    pub norm_ca: f64,
    pub norm_ac: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LapBound {
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "K")]
    pub k: f64,
    /// eps0 clipped to (0, 1]
    pub eps0_used: f64,
    /// C(eps0) = 4 sqrt(2) sup_J ||C||^2 / (c0 eps0)
    #[serde(rename = "C_eps0")]
    pub c_eps0: f64,
    /// the final uniform bound on ||C (H - z)^{-1} C||
    #[serde(rename = "C_final")]
    pub c_final: f64,
}

/// Assemble the explicit limiting-absorption bound from its ingredients.
pub fn lap_bound(inp: &LapInputs) -> Result<LapBound> {
    if !(inp.c0 > 0.0) {
        return Err(Error::ConstraintViolated("c0 > 0".into()));
    }
    if !(inp.eps0 > 0.0) {
        return Err(Error::ConstraintViolated("eps0 > 0".into()));
    }
    if inp.norm_c < 0.0 || inp.norm_ca < 0.0 || inp.norm_ac < 0.0 {
        return Err(Error::ConstraintViolated("weight norms >= 0".into()));
    }
    let max_na = inp.norm_ca.max(inp.norm_ac);
    let k1 = if max_na == 0.0 {
        0.0
    } else {
        if !(inp.tilde_c0 > 0.0) {
            return Err(Error::ConstraintViolated("tilde_c0 > 0".into()));
        }
        2.0 * max_na / inp.tilde_c0.sqrt()
    };
    let k2 = 4.0 * std::f64::consts::SQRT_2 * inp.c2 * inp.sup_j * inp.norm_c / inp.c0;
    let k = (k1 + k2) * inp.norm_c * (1.0 + 2.0 * inp.sup_j.sqrt() / inp.c0.sqrt());
    let eps0_used = inp.eps0.min(1.0);
    let c_eps0 = 4.0 * std::f64::consts::SQRT_2 * inp.sup_j * inp.norm_c * inp.norm_c
        / (inp.c0 * eps0_used);
    // the two universal integrals enter with their exact values 2, sqrt(2 pi)
    let c_final = c_eps0
        + (k1 + k2) * (1.0 + c_eps0.sqrt()) * 2.0
        + std::f64::consts::SQRT_2 * k.sqrt() * (k1 + k2) * (2.0 * std::f64::consts::PI).sqrt();
    Ok(LapBound {
        k1,
        k2,
        k,
        eps0_used,
        c_eps0,
        c_final,
    })
}

/// Convenience composition: the abstract ledger plus weight norms.
pub fn lap_bound_from_ledger(
    led: &ConstantsLedger,
    norm_c: f64,
    norm_ca: f64,
    norm_ac: f64,
) -> Result<LapBound> {
    lap_bound(&LapInputs {
        c0: led.hypotheses.c0,
        tilde_c0: led.tilde_c0,
        sup_j: led.sup_j,
        eps0: led.eps0,
        c2: led.hypotheses.c2,
        norm_c,
        norm_ca,
        norm_ac,
    })
}

/// Parameters of the shrinking semiclassical window around theta_0.
#[derive(Debug, Clone, Serialize)]
pub struct WindowParams {
    pub h: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    /// sup norm of the admissible perturbation
    pub v_norm_inf: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SemiclassicalWindow {
    pub params: WindowParams,
    /// window center e = theta_0 + a h^alpha
    pub e: f64,
    /// inner half-width delta = b h^beta
    pub delta: f64,
    /// outer half-width d = b h^alpha
    pub d: f64,
    pub interval_i: Interval,
    pub interval_j: Interval,
    /// relative window occupancy (delta + h^gamma |V|_inf) / d
    pub c_h: f64,
}

/// Validate the window constraints and materialize the intervals. Failures
/// name the violated inequality.
pub fn build_window(p: &WindowParams, theta0: f64) -> Result<SemiclassicalWindow> {
    let fail = |name: &str| Err(Error::ConstraintViolated(name.into()));
    if !(p.h > 0.0 && p.h < 1.0) {
        return fail("0 < h < 1");
    }
    if !(0.0..1.0).contains(&p.alpha) {
        return fail("0 <= alpha < 1");
    }
    if !(p.beta > 2.0 * p.alpha) {
        return fail("beta > 2*alpha");
    }
    if !(p.b > 0.0 && p.b < p.a) {
        return fail("0 < b < a");
    }
    if !(p.gamma >= p.beta) {
        return fail("gamma >= beta");
    }
    if !(p.gamma > 1.0 + 2.0 * p.alpha) {
        return fail("gamma > 1 + 2*alpha");
    }
    if p.alpha == 0.0 && !(p.a < 1.0 - theta0) {
        return fail("a < 1 - theta_0 (alpha = 0)");
    }
    if p.v_norm_inf < 0.0 {
        return fail("|V|_inf >= 0");
    }
    let e = theta0 + p.a * p.h.powf(p.alpha);
    let delta = p.b * p.h.powf(p.beta);
    let d = p.b * p.h.powf(p.alpha);
    let c_h = (delta + p.h.powf(p.gamma) * p.v_norm_inf) / d;
    Ok(SemiclassicalWindow {
        params: p.clone(),
        e,
        delta,
        d,
        interval_i: Interval::new(e - delta, e + delta),
        interval_j: Interval::new(e - d, e + d),
        c_h,
    })
}

/// Mourre constant of the unperturbed fiber family on the window J: the
/// commutator is bounded below by h * (inf |mu_1'|)^2 over the preimage.
#[derive(Debug, Clone, Serialize)]
pub struct MourreConstant {
    /// inf |mu_1'| over the preimage of J
    pub inf_abs_slope: f64,
    /// h * inf^2, the operator lower bound
    pub constant: f64,
    /// constant / h^{1+alpha}: the prefactor kappa_0 of the predicted scaling
    pub normalized: f64,
}

pub fn unperturbed_mourre_constant(
    ctx: &BandContext,
    window: &SemiclassicalWindow,
) -> Result<MourreConstant> {
    let inf = window_inf_abs_slope(ctx, window.e, window.d)?;
    let h = window.params.h;
    let constant = h * inf * inf;
    Ok(MourreConstant {
        inf_abs_slope: inf,
        constant,
        normalized: constant / h.powf(1.0 + window.params.alpha),
    })
}

/// Exact rational scaling exponents of every ledger constant in the
/// semiclassical regime c0 ~ h^{1+a}, c1 ~ h^{1-a}, c2 ~ h^{2-a}.
#[derive(Debug, Clone, Copy)]
pub struct ExponentTable {
    pub alpha: Ratio<i64>,
    pub c0: Ratio<i64>,
    pub c1: Ratio<i64>,
    pub c2: Ratio<i64>,
    pub eps1: Ratio<i64>,
    pub eps0: Ratio<i64>,
    pub k1: Ratio<i64>,
    pub k2: Ratio<i64>,
    pub k: Ratio<i64>,
    pub c_eps0: Ratio<i64>,
    pub final_exponent: Ratio<i64>,
}

pub fn scaling_exponents(alpha: Ratio<i64>) -> Result<ExponentTable> {
    let zero = Ratio::new(0, 1);
    let one = Ratio::new(1, 1);
    if alpha < zero || alpha >= one {
        return Err(Error::ConstraintViolated("0 <= alpha < 1".into()));
    }
    let r = |n: i64, d: i64| Ratio::new(n, d);
    let c0 = one + alpha;
    let c1 = one - alpha;
    let c2 = r(2, 1) - alpha;
    let eps_formula = -one + r(4, 1) * alpha;
    let k1 = -(one + alpha) / 2;
    let k2 = one - r(2, 1) * alpha;
    let k = -one - alpha;
    let c_eps0 = r(-2, 1) + r(3, 1) * alpha;
    // the three terms of the final bound: C(eps0), (K1+K2)(1+sqrt(C(eps0))),
    // sqrt(K)(K1+K2)
    let term2 = k1 + c_eps0 / 2;
    let term3 = k / 2 + k1;
    let final_exponent = c_eps0.min(term2).min(term3);
    Ok(ExponentTable {
        alpha,
        c0,
        c1,
        c2,
        eps1: eps_formula,
        eps0: eps_formula,
        k1,
        k2,
        k,
        c_eps0,
        final_exponent,
    })
}

/// Parse "p/q" or a decimal string into an exact rational.
pub fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    let bad = || Error::ConfigInvalid(format!("cannot parse '{s}' as a rational"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num: i64 = p.trim().parse().map_err(|_| bad())?;
        let den: i64 = q.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let whole: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let num: i64 = frac.parse().map_err(|_| bad())?;
        let den = 10i64.pow(frac.len() as u32);
        let frac_part = Ratio::new(num, den);
        let whole_part = Ratio::new(whole, 1);
        return Ok(if neg {
            whole_part - frac_part
        } else {
            whole_part + frac_part
        });
    }
    let whole: i64 = s.parse().map_err(|_| bad())?;
    Ok(Ratio::new(whole, 1))
}

/// One row of the scaling audit at a fixed h.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AuditRow {
    pub h: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub eps0: f64,
    pub c_final: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingAudit {
    pub alpha: f64,
    /// band-calibrated prefactor of c0 = kappa0 h^{1+alpha}
    pub kappa0: f64,
    pub rows: Vec<AuditRow>,
    pub fitted_slope: f64,
    pub expected_slope: f64,
    pub intercept: f64,
    pub max_log_residual: f64,
}

#[derive(Debug, Clone)]
pub struct AuditOptions {
    pub alpha: f64,
    pub h_grid: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub c1_prefactor: f64,
    pub c2_prefactor: f64,
    /// max tolerated log residual before the fit is declared unstable
    pub residual_tol: f64,
}

impl AuditOptions {
    pub fn new(alpha: f64) -> Self {
        AuditOptions {
            alpha,
            h_grid: log_grid(1e-12, 1e-6, 13),
            a: 0.3,
            b: 0.15,
            c1_prefactor: 1.0,
            c2_prefactor: 1.0,
            residual_tol: 1.0,
        }
    }
}

/// Log-spaced grid, ascending.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Instantiate the semiclassical scaling of every constant on a grid of h,
/// run the explicit resolvent bound at each, and fit the decay exponent of
/// the final constant against the predicted min(-2+3a, -3/2+a, -1-a).
pub fn scaling_audit(ctx: &BandContext, opts: &AuditOptions) -> Result<ScalingAudit> {
    if !(0.0..1.0).contains(&opts.alpha) {
        return Err(Error::ConstraintViolated("0 <= alpha < 1".into()));
    }
    if opts.h_grid.len() < 3
        || opts.h_grid.windows(2).any(|w| w[1] <= w[0])
        || opts.h_grid[0] <= 0.0
        || *opts.h_grid.last().unwrap() >= 1.0
    {
        return Err(Error::ConfigInvalid(
            "h grid must be ascending inside (0, 1) with at least 3 points".into(),
        ));
    }
    let alpha = opts.alpha;
    let beta = 2.0 * alpha + 0.5;
    let gamma = beta.max(1.0 + 2.0 * alpha) + 0.5;

    // calibrate kappa0 from the actual band data at the largest h
    let h_ref = *opts.h_grid.last().unwrap();
    let wp = WindowParams {
        h: h_ref,
        alpha,
        beta,
        gamma,
        a: opts.a,
        b: opts.b,
        v_norm_inf: 0.0,
    };
    let window_ref = build_window(&wp, ctx.theta0())?;
    let kappa0 = unperturbed_mourre_constant(ctx, &window_ref)?.normalized;

    let mut rows = Vec::with_capacity(opts.h_grid.len());
    for &h in &opts.h_grid {
        let e = ctx.theta0() + opts.a * h.powf(alpha);
        let d = opts.b * h.powf(alpha);
        let sup_j = {
            let t = e + d;
            (t * t + 1.0).sqrt()
        };
        let c0 = kappa0 * h.powf(1.0 + alpha);
        let c1 = opts.c1_prefactor * h.powf(1.0 - alpha);
        let c2 = opts.c2_prefactor * h.powf(2.0 - alpha);
        // admissible coupling scale: the abstract formula's h^{4a-1} exceeds
        // the eps <= 1 cap below the triple point, so the audited eps0 is
        // min(1, h^{1-4a})
        let eps0 = h.powf(1.0 - 4.0 * alpha).min(1.0);
        let bound = lap_bound(&LapInputs {
            c0,
            tilde_c0: c0,
            sup_j,
            eps0,
            c2,
            norm_c: 1.0,
            norm_ca: 1.0,
            norm_ac: 1.0,
        })?;
        rows.push(AuditRow {
            h,
            c0,
            c1,
            c2,
            eps0,
            c_final: bound.c_final,
        });
    }

    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let cs: Vec<f64> = rows.iter().map(|r| r.c_final).collect();
    let fit = power_law_fit(&hs, &cs)?;
    if fit.max_residual > opts.residual_tol {
        return Err(Error::FitUnstable {
            residual: fit.max_residual,
        });
    }
    let expected_slope = (-2.0 + 3.0 * alpha)
        .min(-1.5 + alpha)
        .min(-1.0 - alpha);
    Ok(ScalingAudit {
        alpha,
        kappa0,
        rows,
        fitted_slope: fit.slope,
        expected_slope,
        intercept: fit.intercept,
        max_log_residual: fit.max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_hypotheses() -> MourreHypotheses {
        MourreHypotheses {
            c0: 1.0,
            c1: 1.0,
            c2: 1.0,
            interval_i: Interval::new(2.0, 3.0),
            interval_j: Interval::new(1.0, 4.0),
            strip_height: 1.0,
        }
    }

    #[test]
    fn worked_example_eps1() {
        let led = ledger(&worked_hypotheses()).unwrap();
        assert!((led.sup_j - 17f64.sqrt()).abs() < 1e-15);
        assert!((led.sup_b - 13f64.sqrt()).abs() < 1e-15);
        assert!((led.dist_i_jc - 1.0).abs() < 1e-15);
        let expected = (1.0 / (13f64.sqrt() + 1.0)) * (1.0 / (4.0 * 17f64.sqrt()));
        assert!(
            (led.eps1 - expected).abs() < 1e-15,
            "eps1 = {:.17}",
            led.eps1
        );
    }

    #[test]
    fn eps_ordering_and_positivity() {
        let led = ledger(&worked_hypotheses()).unwrap();
        assert!(led.eps0 > 0.0 && led.eps1 > 0.0 && led.eps2 > 0.0);
        assert!(led.eps0 <= led.eps1 + 1e-18);
        assert!(led.eps2 <= led.eps1 + 1e-18);
        assert!(led.tilde_c0 > 0.0 && led.tilde_c0 < led.hypotheses.c0);
        assert!((led.int_t_inv_sqrt - 2.0).abs() < 1e-10);
        assert!((led.int_sqrt_log - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn degenerate_small_c1_takes_second_argument() {
        // for c1 < c0 / (2 sup_J) the binding term of eps1 is 1/(2 c1)
        let mut hyp = worked_hypotheses();
        hyp.c1 = 0.01;
        let led = ledger(&hyp).unwrap();
        let factor = 1.0 / (13f64.sqrt() + 1.0);
        assert!((led.eps1 - factor * 50.0).abs() < 1e-12, "{}", led.eps1);
        // and c1 = 0 leaves eps1 unconstrained but eps0 finite
        hyp.c1 = 0.0;
        let led0 = ledger(&hyp).unwrap();
        assert!(led0.eps1.is_infinite());
        assert!(led0.eps0.is_finite() && led0.eps0 > 0.0);
    }

    #[test]
    fn resolvent_chain_is_positive_on_admissible_eps() {
        let led = ledger(&worked_hypotheses()).unwrap();
        for k in 1..=20 {
            let eps = led.eps1 * k as f64 / 20.0;
            for &z in &[(1.0, 0.0), (4.0, 1.0), (2.5, 0.5), (-0.0, 0.2)] {
                assert!(led.c_of(eps, z) > 0.0, "C at eps={eps} z={z:?}");
                assert!(led.d1(eps, z) > 0.0, "D1 at eps={eps} z={z:?}");
                assert!(led.d2(eps, z) > 0.0, "D2 at eps={eps} z={z:?}");
                assert!(led.d3(eps, z) > 0.0, "D3 at eps={eps} z={z:?}");
            }
        }
    }

    #[test]
    fn invalid_hypotheses_are_named() {
        let mut hyp = worked_hypotheses();
        hyp.interval_i = Interval::new(0.5, 3.0);
        match ledger(&hyp) {
            Err(Error::ConstraintViolated(msg)) => assert!(msg.contains("inside")),
            other => panic!("expected ConstraintViolated, got {other:?}"),
        }
    }

    #[test]
    fn lap_bound_vanishes_with_zero_weights() {
        let led = ledger(&worked_hypotheses()).unwrap();
        let b = lap_bound_from_ledger(&led, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(b.c_final, 0.0);
        assert_eq!(b.k1, 0.0);
        assert_eq!(b.k2, 0.0);
    }

    #[test]
    fn lap_bound_worked_example_is_finite_positive() {
        let led = ledger(&worked_hypotheses()).unwrap();
        let b = lap_bound_from_ledger(&led, 1.0, 1.0, 1.0).unwrap();
        assert!(b.c_final.is_finite() && b.c_final > 0.0);
        assert!(b.c_eps0 > 0.0 && b.k > 0.0);
        // the headline term: 4 sqrt(2) sup_J / (c0 eps0)
        let expect = 4.0 * std::f64::consts::SQRT_2 * 17f64.sqrt() / led.eps0;
        assert!((b.c_eps0 - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn window_constraints_name_the_failure() {
        let p = WindowParams {
            h: 0.01,
            alpha: 0.3,
            beta: 0.5, // needs > 0.6
            gamma: 2.2,
            a: 0.3,
            b: 0.15,
            v_norm_inf: 0.0,
        };
        match build_window(&p, 0.59) {
            Err(Error::ConstraintViolated(msg)) => assert_eq!(msg, "beta > 2*alpha"),
            other => panic!("unexpected {other:?}"),
        }
        let ok = build_window(
            &WindowParams {
                beta: 1.1,
                ..p.clone()
            },
            0.59,
        )
        .unwrap();
        assert!(ok.interval_i.lo > ok.interval_j.lo && ok.interval_i.hi < ok.interval_j.hi);
        assert!((ok.c_h - (ok.delta / ok.d)).abs() < 1e-15);
    }

    #[test]
    fn exponent_table_exact_values() {
        let quarter = Ratio::new(1i64, 4);
        let t = scaling_exponents(quarter).unwrap();
        assert_eq!(t.final_exponent, Ratio::new(-5, 4));
        assert_eq!(t.c0, Ratio::new(5, 4));
        assert_eq!(t.c_eps0, Ratio::new(-5, 4));

        let t0 = scaling_exponents(Ratio::new(0, 1)).unwrap();
        assert_eq!(t0.final_exponent, Ratio::new(-2, 1));
        let th = scaling_exponents(Ratio::new(1, 2)).unwrap();
        assert_eq!(th.final_exponent, Ratio::new(-3, 2));
        assert_eq!(th.k2, Ratio::new(0, 1));
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("1/4").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_ratio("0.25").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_ratio("-0.5").unwrap(), Ratio::new(-1, 2));
        assert_eq!(parse_ratio("2").unwrap(), Ratio::new(2, 1));
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1/0").is_err());
    }
}
