//! Command-line front end: six subcommands over the library, a strict exit
//! code contract (0 ok, 2 checks failed, 3 numerical failure, 4 invalid
//! configuration), and deterministic CSV/JSON/SVG artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::band::{
    check_rappel, derivatives_at, find_minimum, sample_band, BandContext, PropertyCheck,
};
use crate::current::{agmon_report, current_sign_scan, current_window};
use crate::error::{Error, Result};
use crate::mourre::{
    lap_bound_from_ledger, ledger, parse_ratio, scaling_audit, scaling_exponents, AuditOptions,
    Interval, MourreHypotheses,
};
use crate::report::{fmt17, hashed_svg_name, line_plot_svg, Series};
use crate::solver::DiscretizationConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INVALID_CONFIG: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "degennes",
    about = "Spectral toolkit for the half-line oscillator family d^2/dx^2 + (xi - x)^2 \
             with a Neumann wall: band functions, edge currents, localization, \
             and explicit resolvent constants."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample band functions, locate their minima, and verify their
    /// structural properties (monotone branches, interlacing, Landau limits).
    Band(BandArgs),
    /// Estimate the third derivative of the first band at its minimum at two
    /// independent resolutions and report a SUPPORTED / INCONCLUSIVE verdict.
    Conjecture(ConjectureArgs),
    /// Edge current c(e): sign scan over (theta_0, 1) or a spectral-window
    /// report at a fixed energy.
    Current(CurrentArgs),
    /// Exponentially weighted norms of the fiber ground states below a given
    /// energy, with the uniform decay constants.
    Agmon(AgmonArgs),
    /// Constants ledger of the limiting-absorption argument, the assembled
    /// resolvent bound, and (optionally) the exact scaling exponent table.
    Mourre(MourreArgs),
    /// Instantiate the semiclassical scaling of every constant on an h grid
    /// and fit the decay exponent of the final bound against the prediction.
    Audit(AuditArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand. Precedence: command-line flags override
/// the optional key=value config file, which overrides built-in defaults.
#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// key = value configuration file (keys: domain_length, grid_points,
    /// refinement_levels, target_tol)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// output directory for artifacts
    #[arg(long, default_value = "out", global = true)]
    pub out: PathBuf,
    /// tabular output format
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    /// also emit an SVG plot (content-hashed filename)
    #[arg(long, global = true)]
    pub plot: bool,
    /// seed for randomized spot checks
    #[arg(long, default_value_t = 42, global = true)]
    pub seed: u64,
    /// base truncation length of the half-line
    #[arg(long)]
    pub domain_length: Option<f64>,
    /// grid points of the coarsest refinement level
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Richardson ladder depth
    #[arg(long)]
    pub refinement_levels: Option<usize>,
    /// acceptance threshold for the extrapolated eigenvalue error
    #[arg(long)]
    pub target_tol: Option<f64>,
}

impl CommonArgs {
    pub fn effective_config(&self) -> Result<DiscretizationConfig> {
        let mut cfg = DiscretizationConfig::default();
        if let Some(path) = &self.config {
            apply_config_file(&mut cfg, path)?;
        }
        if let Some(v) = self.domain_length {
            cfg.domain_length = v;
        }
        if let Some(v) = self.grid_points {
            cfg.grid_points = v;
        }
        if let Some(v) = self.refinement_levels {
            cfg.refinement_levels = v;
        }
        if let Some(v) = self.target_tol {
            cfg.target_tol = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn apply_config_file(cfg: &mut DiscretizationConfig, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::ConfigInvalid(format!("cannot read {}: {e}", path.display())))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::ConfigInvalid(format!(
                "{}:{}: expected 'key = value'",
                path.display(),
                lineno + 1
            ))
        })?;
        let value = value.trim();
        let bad = |what: &str| {
            Error::ConfigInvalid(format!(
                "{}:{}: invalid {what}: '{value}'",
                path.display(),
                lineno + 1
            ))
        };
        match key.trim() {
            "domain_length" => cfg.domain_length = value.parse().map_err(|_| bad("float"))?,
            "grid_points" => cfg.grid_points = value.parse().map_err(|_| bad("integer"))?,
            "refinement_levels" => {
                cfg.refinement_levels = value.parse().map_err(|_| bad("integer"))?
            }
            "target_tol" => cfg.target_tol = value.parse().map_err(|_| bad("float"))?,
            other => {
                return Err(Error::ConfigInvalid(format!(
                    "{}:{}: unknown config key '{other}'",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct BandArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// band indices to sample
    #[arg(long = "j", value_delimiter = ',', default_values_t = vec![1usize, 2, 3])]
    pub bands: Vec<usize>,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub xi_min: f64,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    pub xi_max: f64,
    #[arg(long, default_value_t = 141)]
    pub samples: usize,
    /// number of seeded random off-node interpolation spot checks per band
    #[arg(long, default_value_t = 0)]
    pub verify_interpolant: usize,
}

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// base step of the central-difference derivative stencils
    #[arg(long, default_value_t = 1e-2)]
    pub step: f64,
    /// grid points of the independent second resolution
    /// (default: 0.688 x grid_points)
    #[arg(long)]
    pub grid_points_b: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CurrentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// scan c(e) for a sign change on a uniform energy grid
    #[arg(long)]
    pub scan: bool,
    #[arg(long)]
    pub e_min: Option<f64>,
    #[arg(long)]
    pub e_max: Option<f64>,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
    /// window center energy (report mode)
    #[arg(long)]
    pub e: Option<f64>,
    /// window half-width (report mode)
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct AgmonArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// energy ceiling: fibers with mu_1(xi) <= e are included
    #[arg(long, default_value_t = 0.9)]
    pub e: f64,
    /// exponential weight rate of e^{Kx}
    #[arg(long = "K", alias = "k", default_value_t = 1.0)]
    pub k: f64,
    /// number of fibers across the sub-level set
    #[arg(long, default_value_t = 25)]
    pub n_xi: usize,
}

#[derive(Debug, Args)]
pub struct MourreArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// semiclassical exponent ("1/4" or "0.25"): adds the exact exponent table
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub c0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    #[arg(long, default_value_t = 2.0)]
    pub i_lo: f64,
    #[arg(long, default_value_t = 3.0)]
    pub i_hi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub j_lo: f64,
    #[arg(long, default_value_t = 4.0)]
    pub j_hi: f64,
    /// height M of the complex strip B = I x (0, M]
    #[arg(long, default_value_t = 1.0)]
    pub strip_height: f64,
    #[arg(long, default_value_t = 1.0)]
    pub norm_c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub norm_ca: f64,
    #[arg(long, default_value_t = 1.0)]
    pub norm_ac: f64,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub h_min: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub h_max: f64,
    #[arg(long, default_value_t = 13)]
    pub points: usize,
    /// window center offset prefactor: e = theta_0 + a h^alpha
    #[arg(long, default_value_t = 0.3)]
    pub a: f64,
    /// window width prefactor: d = b h^alpha
    #[arg(long, default_value_t = 0.15)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c1_prefactor: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2_prefactor: f64,
    /// pass/fail tolerance on |fitted slope - predicted slope|
    #[arg(long, default_value_t = 0.05)]
    pub slope_tol: f64,
}

/// Parse the command line, run it, and return the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version output is not an error
            if e.use_stderr() {
                eprintln!("{e}");
                return EXIT_INVALID_CONFIG;
            }
            print!("{e}");
            return EXIT_OK;
        }
    };
    match dispatch(&cli.command) {
        Ok(all_passed) => {
            if all_passed {
                EXIT_OK
            } else {
                EXIT_CHECKS_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e:?}: {e}");
            match e {
                Error::ConfigInvalid(_)
                | Error::ConstraintViolated(_)
                | Error::EnergyOutOfRange { .. } => EXIT_INVALID_CONFIG,
                _ => EXIT_NUMERICAL,
            }
        }
    }
}

fn dispatch(cmd: &Command) -> Result<bool> {
    match cmd {
        Command::Band(a) => cmd_band(a),
        Command::Conjecture(a) => cmd_conjecture(a),
        Command::Current(a) => cmd_current(a),
        Command::Agmon(a) => cmd_agmon(a),
        Command::Mourre(a) => cmd_mourre(a),
        Command::Audit(a) => cmd_audit(a),
    }
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::ConfigInvalid(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| Error::ConfigInvalid(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Sidecar recording the effective configuration next to CSV artifacts.
fn write_config_sidecar(dir: &Path, command: &str, cfg: &DiscretizationConfig) -> Result<()> {
    let v = json!({ "command": command, "config": cfg });
    write_artifact(dir, &format!("{command}_config.json"), &json_string(&v))?;
    Ok(())
}

fn print_checks(checks: &[PropertyCheck]) {
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("check {}: {status} ({})", c.name, c.detail);
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn uniform01(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 / (1u64 << 53) as f64
}

fn cmd_band(args: &BandArgs) -> Result<bool> {
    let cfg = args.common.effective_config()?;
    if args.bands.is_empty() || args.bands.contains(&0) {
        return Err(Error::ConfigInvalid(
            "band indices must be positive and nonempty".into(),
        ));
    }
    let out = &args.common.out;
    let mut bands = Vec::new();
    for &j in &args.bands {
        bands.push(sample_band(j, args.xi_min, args.xi_max, args.samples, &cfg)?);
    }

    // structural checks; NoBracket here means no minimum inside the range
    let mut report = check_rappel(&bands)?;
    let minima: Vec<_> = bands
        .iter()
        .map(find_minimum)
        .collect::<Result<Vec<_>>>()?;

    // seeded off-node spot checks of the interpolant against fresh solves
    if args.verify_interpolant > 0 {
        let mut state = args.common.seed;
        for band in &bands {
            let (lo, hi) = band.xi_range();
            let mut worst = 0.0f64;
            for _ in 0..args.verify_interpolant {
                let xi = lo + (hi - lo) * uniform01(&mut state);
                let (mu_fresh, _, _, _) = band.value_at(xi)?;
                worst = worst.max((band.eval(xi) - mu_fresh).abs());
            }
            report.checks.push(PropertyCheck {
                name: format!("band{}_interpolant_fidelity", band.band_index),
                passed: worst < 1e-6,
                margin: 1e-6 - worst,
                detail: format!(
                    "max |interp - fresh| = {worst:.3e} over {} seeded points",
                    args.verify_interpolant
                ),
            });
        }
    }
    print_checks(&report.checks);

    for band in &bands {
        let mut buf = Vec::new();
        band.write_csv(&mut buf)
            .map_err(|e| Error::ConfigInvalid(format!("csv serialization: {e}")))?;
        let text = String::from_utf8(buf).expect("csv is utf-8");
        write_artifact(out, &format!("band_{}.csv", band.band_index), &text)?;
    }
    write_config_sidecar(out, "band", &cfg)?;

    let band_objects: Vec<Value> = bands
        .iter()
        .zip(&minima)
        .map(|(band, min)| {
            json!({
                "band_index": band.band_index,
                "samples": band.samples,
                "minimum": min,
            })
        })
        .collect();
    let report_json = json!({
        "bands": band_objects,
        "properties": report,
        "config": cfg,
    });
    write_artifact(out, "band_properties.json", &json_string(&report_json))?;
    if args.common.format == Format::Json {
        write_artifact(out, "bands.json", &json_string(&report_json))?;
    }

    if args.common.plot {
        let pts: Vec<Vec<(f64, f64)>> = bands
            .iter()
            .map(|b| b.samples.iter().map(|s| (s.xi, s.mu)).collect())
            .collect();
        let labels: Vec<String> = bands
            .iter()
            .map(|b| format!("mu_{}", b.band_index))
            .collect();
        let series: Vec<Series<'_>> = pts
            .iter()
            .zip(&labels)
            .map(|(p, l)| Series {
                label: l,
                points: p,
            })
            .collect();
        let svg = line_plot_svg("band functions", "xi", "mu_j(xi)", &series, false, false);
        write_artifact(out, &hashed_svg_name("band", &svg), &svg)?;
    }
    Ok(report.all_passed())
}

fn cmd_conjecture(args: &ConjectureArgs) -> Result<bool> {
    let cfg = args.common.effective_config()?;
    if !(args.step > 0.0 && args.step < 0.5) {
        return Err(Error::ConfigInvalid("step must lie in (0, 0.5)".into()));
    }
    let out = &args.common.out;

    // locate the minimum once on the primary resolution
    let locator = sample_band(1, 0.2, 1.4, 25, &cfg)?;
    let minimum = find_minimum(&locator)?;
    let xi0 = minimum.xi_star;

    // two independent grid resolutions with an irrational-ish ratio so their
    // discretization errors cannot cancel by coincidence
    let mut cfg_b = cfg.clone();
    cfg_b.grid_points = args
        .grid_points_b
        .unwrap_or(((cfg.grid_points as f64) * 0.688).round() as usize)
        .max(16);

    let mut resolutions = Vec::new();
    for c in [&cfg, &cfg_b] {
        let band = sample_band(1, xi0 - 0.2, xi0 + 0.2, 5, c)?;
        let d = derivatives_at(&band, xi0, args.step)?;
        resolutions.push((c.grid_points, d));
    }
    let (n_a, da) = &resolutions[0];
    let (n_b, db) = &resolutions[1];

    let excludes_zero = |v: f64, bar: f64| v.abs() > bar;
    let consistent = (da.third - db.third).abs() <= da.third_error_bar + db.third_error_bar;
    let verdict = if da.third < 0.0
        && db.third < 0.0
        && excludes_zero(da.third, da.third_error_bar)
        && excludes_zero(db.third, db.third_error_bar)
        && consistent
    {
        "SUPPORTED"
    } else if da.third > 0.0
        && db.third > 0.0
        && excludes_zero(da.third, da.third_error_bar)
        && excludes_zero(db.third, db.third_error_bar)
        && consistent
    {
        "REFUTED"
    } else {
        "INCONCLUSIVE"
    };

    let report = json!({
        "xi_star": xi0,
        "theta": minimum.theta,
        "third_derivative": da.third,
        "error_bar": da.third_error_bar,
        "verdict": verdict,
        "cross_check": {
            "resolutions": [
                { "grid_points": n_a, "third_derivative": da.third, "error_bar": da.third_error_bar },
                { "grid_points": n_b, "third_derivative": db.third, "error_bar": db.third_error_bar },
            ],
            "consistent": consistent,
        },
        "step": args.step,
        "config": cfg,
    });
    println!(
        "third derivative at the minimum: {:.6} +/- {:.2e} ({verdict})",
        da.third, da.third_error_bar
    );
    write_artifact(out, "conjecture.json", &json_string(&report))?;
    Ok(verdict != "REFUTED")
}

fn cmd_current(args: &CurrentArgs) -> Result<bool> {
    let cfg = args.common.effective_config()?;
    let out = &args.common.out;
    let ctx = BandContext::build(&cfg)?;
    if args.scan {
        let e_lo = args.e_min.unwrap_or(ctx.theta0() + 1e-3);
        let e_hi = args.e_max.unwrap_or(1.0 - 1e-3);
        let scan = current_sign_scan(&ctx, e_lo, e_hi, args.points)?;

        let mut csv = String::from("e,c\n");
        for r in &scan.rows {
            csv.push_str(&format!("{},{}\n", fmt17(r.e), fmt17(r.c)));
        }
        write_artifact(out, "current_scan.csv", &csv)?;
        write_config_sidecar(out, "current", &cfg)?;
        let report = json!({
            "theta0": ctx.theta0(),
            "rows": scan.rows,
            "e_star_candidate": scan.e_star_candidate,
            "config": cfg,
        });
        write_artifact(out, "current_scan.json", &json_string(&report))?;
        match scan.e_star_candidate {
            Some(e) => println!("sign change candidate at e = {e:.8}"),
            None => println!("no sign change of c(e) on [{e_lo:.6}, {e_hi:.6}]"),
        }

        if args.common.plot {
            let pts: Vec<(f64, f64)> = scan.rows.iter().map(|r| (r.e, r.c)).collect();
            let svg = line_plot_svg(
                "edge current",
                "e",
                "c(e)",
                &[Series {
                    label: "c",
                    points: &pts,
                }],
                false,
                false,
            );
            write_artifact(out, &hashed_svg_name("current", &svg), &svg)?;
        }
        return Ok(true);
    }

    let (e, delta) = match (args.e, args.delta) {
        (Some(e), Some(d)) => (e, d),
        _ => {
            return Err(Error::ConfigInvalid(
                "need --scan, or both --e and --delta".into(),
            ))
        }
    };
    let report = current_window(&ctx, e, delta)?;
    println!(
        "window [{:.6} - {delta:.0e}, {:.6} + {delta:.0e}]: c(e) = {:.8}, dominant side {}",
        e, e, report.c_of_e, report.dominant_side
    );
    let v = json!({ "report": report, "config": cfg });
    write_artifact(out, "current_window.json", &json_string(&v))?;
    Ok(true)
}

fn cmd_agmon(args: &AgmonArgs) -> Result<bool> {
    let cfg = args.common.effective_config()?;
    let out = &args.common.out;
    let ctx = BandContext::build(&cfg)?;
    let report = agmon_report(&ctx, args.e, args.k, args.n_xi)?;
    println!(
        "sup over {} fibers of the e^{{Kx}}-weighted norm: {:.8} (C_e = {:.8}, x_eK = {:.8})",
        args.n_xi, report.sup_weighted_norm, report.c_e, report.x_e_k
    );
    let v = json!({ "report": report, "config": cfg });
    write_artifact(out, "agmon.json", &json_string(&v))?;
    if args.common.plot {
        let pts: Vec<(f64, f64)> = report
            .per_xi
            .iter()
            .map(|f| (f.xi, f.weighted_norm))
            .collect();
        let svg = line_plot_svg(
            "weighted fiber norms",
            "xi",
            "int e^{Kx} |u_1|^2",
            &[Series {
                label: "weighted norm",
                points: &pts,
            }],
            false,
            false,
        );
        write_artifact(out, &hashed_svg_name("agmon", &svg), &svg)?;
    }
    Ok(report.sup_weighted_norm.is_finite())
}

fn cmd_mourre(args: &MourreArgs) -> Result<bool> {
    let out = &args.common.out;
    let hyp = MourreHypotheses {
        c0: args.c0,
        c1: args.c1,
        c2: args.c2,
        interval_i: Interval::new(args.i_lo, args.i_hi),
        interval_j: Interval::new(args.j_lo, args.j_hi),
        strip_height: args.strip_height,
    };
    let led = ledger(&hyp)?;
    let chain = led.sample_chain(8, 4);
    let lap = lap_bound_from_ledger(&led, args.norm_c, args.norm_ca, args.norm_ac)?;

    let exponents = match &args.alpha {
        Some(s) => {
            let alpha = parse_ratio(s)?;
            let t = scaling_exponents(alpha)?;
            let pair = |r: num_rational::Ratio<i64>| {
                json!({
                    "exact": format!("{}/{}", r.numer(), r.denom()),
                    "value": *r.numer() as f64 / *r.denom() as f64,
                })
            };
            println!(
                "scaling exponents at alpha = {s}: C_final ~ h^{}",
                *t.final_exponent.numer() as f64 / *t.final_exponent.denom() as f64
            );
            json!({
                "alpha": pair(t.alpha),
                "c0": pair(t.c0),
                "c1": pair(t.c1),
                "c2": pair(t.c2),
                "eps1": pair(t.eps1),
                "eps0": pair(t.eps0),
                "K1": pair(t.k1),
                "K2": pair(t.k2),
                "K": pair(t.k),
                "C_eps0": pair(t.c_eps0),
                "final_exponent": pair(t.final_exponent),
            })
        }
        None => Value::Null,
    };

    println!(
        "eps1 = {:.12}, eps0 = {:.12}, c0_tilde = {:.12}, C_final = {:.8}",
        led.eps1, led.eps0, led.tilde_c0, lap.c_final
    );
    let v = json!({
        "ledger": led,
        "chain_samples": chain,
        "lap": lap,
        "exponents": exponents,
    });
    write_artifact(out, "mourre.json", &json_string(&v))?;
    Ok(true)
}

fn cmd_audit(args: &AuditArgs) -> Result<bool> {
    let cfg = args.common.effective_config()?;
    let out = &args.common.out;
    if args.points < 3 || !(args.h_min < args.h_max) || args.h_min <= 0.0 || args.h_max >= 1.0 {
        return Err(Error::ConfigInvalid(
            "need h_min < h_max inside (0, 1) and at least 3 points".into(),
        ));
    }
    let ctx = BandContext::build(&cfg)?;
    let mut opts = AuditOptions::new(args.alpha);
    opts.h_grid = crate::mourre::log_grid(args.h_min, args.h_max, args.points);
    opts.a = args.a;
    opts.b = args.b;
    opts.c1_prefactor = args.c1_prefactor;
    opts.c2_prefactor = args.c2_prefactor;
    let audit = scaling_audit(&ctx, &opts)?;

    let mut csv = String::from("h,c0,c1,c2,eps0,C_final\n");
    for r in &audit.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt17(r.h),
            fmt17(r.c0),
            fmt17(r.c1),
            fmt17(r.c2),
            fmt17(r.eps0),
            fmt17(r.c_final)
        ));
    }
    write_artifact(out, "audit.csv", &csv)?;
    write_config_sidecar(out, "audit", &cfg)?;

    let dev = (audit.fitted_slope - audit.expected_slope).abs();
    let passed = dev <= args.slope_tol;
    let v = json!({
        "audit": audit,
        "slope_deviation": dev,
        "slope_tol": args.slope_tol,
        "passed": passed,
        "config": cfg,
    });
    write_artifact(out, "audit.json", &json_string(&v))?;
    println!(
        "alpha = {}: fitted slope {:.4}, predicted {:.4}, deviation {:.4} ({})",
        args.alpha,
        audit.fitted_slope,
        audit.expected_slope,
        dev,
        if passed { "PASS" } else { "FAIL" }
    );

    if args.common.plot {
        let pts: Vec<(f64, f64)> = audit.rows.iter().map(|r| (r.h, r.c_final)).collect();
        let fit: Vec<(f64, f64)> = audit
            .rows
            .iter()
            .map(|r| {
                (
                    r.h,
                    (audit.intercept + audit.fitted_slope * r.h.ln()).exp(),
                )
            })
            .collect();
        let svg = line_plot_svg(
            "resolvent bound scaling",
            "h",
            "C_final(h)",
            &[
                Series {
                    label: "C_final",
                    points: &pts,
                },
                Series {
                    label: "power-law fit",
                    points: &fit,
                },
            ],
            true,
            true,
        );
        write_artifact(out, &hashed_svg_name("audit", &svg), &svg)?;
    }
    Ok(passed)
}
