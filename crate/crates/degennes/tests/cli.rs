//! End-to-end checks of the binary: exit codes, artifact determinism,
//! configuration precedence, and the JSON contracts.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_degennes")
}

fn out_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("degennes_cli_{tag}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

const FAST: &[&str] = &[
    "--grid-points",
    "400",
    "--refinement-levels",
    "3",
    "--target-tol",
    "1e-5",
];

#[test]
fn band_artifacts_are_deterministic() {
    let d1 = out_dir("det1");
    let d2 = out_dir("det2");
    for d in [&d1, &d2] {
        let out = run(&[
            &["band", "--j", "1", "--xi-min", "-1", "--xi-max", "2", "--samples", "9",
              "--plot", "--verify-interpolant", "2", "--out", d.to_str().unwrap()][..],
            FAST,
        ]
        .concat());
        // the short range excludes the Landau tail, so a check fails: exit 2
        assert_eq!(out.status.code(), Some(2), "{out:?}");
    }
    for name in ["band_1.csv", "band_properties.json", "band_config.json"] {
        let a = fs::read(d1.join(name)).expect(name);
        let b = fs::read(d2.join(name)).expect(name);
        assert_eq!(a, b, "artifact {name} differs between identical runs");
    }
    // the SVG name is a content hash: identical runs produce identical names
    let svgs = |d: &PathBuf| -> Vec<String> {
        let mut v: Vec<String> = fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n.ends_with(".svg"))
            .collect();
        v.sort();
        v
    };
    assert_eq!(svgs(&d1), svgs(&d2));
    assert!(svgs(&d1)[0].starts_with("band_"));
}

#[test]
fn missing_minimum_reports_no_bracket_with_exit_3() {
    let d = out_dir("nobracket");
    let out = run(&[
        &["band", "--j", "1", "--xi-max", "0.5", "--samples", "9",
          "--out", d.to_str().unwrap()][..],
        FAST,
    ]
    .concat());
    assert_eq!(out.status.code(), Some(3), "{out:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("NoBracket"), "stderr: {stderr}");
}

#[test]
fn invalid_configuration_exits_4() {
    let d = out_dir("invalid");
    let out = run(&["band", "--grid-points", "8", "--out", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");

    let cfg_file = out_dir("badkey").with_extension("cfg");
    fs::write(&cfg_file, "no_such_key = 1\n").unwrap();
    let out = run(&[
        "band",
        "--config",
        cfg_file.to_str().unwrap(),
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");

    // I must sit strictly inside J
    let out = run(&[
        "mourre", "--i-lo", "0", "--i-hi", "5", "--out", d.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");
}

#[test]
fn flags_override_config_file_which_overrides_defaults() {
    let d = out_dir("prec");
    let cfg_file = std::env::temp_dir().join(format!("degennes_prec_{}.cfg", std::process::id()));
    fs::write(&cfg_file, "grid_points = 900\ntarget_tol = 2e-5\n# comment\n").unwrap();
    let out = run(&[
        "band", "--j", "1", "--xi-min", "0.2", "--xi-max", "1.4", "--samples", "9",
        "--config", cfg_file.to_str().unwrap(),
        "--grid-points", "800",
        "--out", d.to_str().unwrap(),
    ]);
    assert!(out.status.code().is_some(), "{out:?}");
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("band_config.json")).unwrap()).unwrap();
    // flag beats file
    assert_eq!(sidecar["config"]["grid_points"], 800);
    // file beats default
    assert_eq!(sidecar["config"]["target_tol"], 2e-5);
    // default fills the rest
    assert_eq!(sidecar["config"]["domain_length"], 12.0);
}

#[test]
fn coarse_grid_conjecture_is_inconclusive() {
    let d = out_dir("coarse");
    let out = run(&[
        "conjecture",
        "--grid-points", "24",
        "--grid-points-b", "26",
        "--step", "0.02",
        "--refinement-levels", "3",
        "--target-tol", "1e-1",
        "--out", d.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("conjecture.json")).unwrap()).unwrap();
    assert_eq!(v["verdict"], "INCONCLUSIVE");
}

#[test]
fn mourre_json_contract_and_exponents() {
    let d = out_dir("mourre");
    let out = run(&["mourre", "--alpha", "0.25", "--out", d.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("mourre.json")).unwrap()).unwrap();

    for key in ["eps0", "eps1", "eps2", "c0_tilde"] {
        assert!(v["ledger"].get(key).is_some(), "ledger key {key}");
    }
    for key in ["K1", "K2", "K", "C_eps0", "C_final"] {
        assert!(v["lap"].get(key).is_some(), "lap key {key}");
    }
    // the estimate chain is tabulated on an (eps, z) grid
    let chain = v["chain_samples"].as_array().expect("chain samples");
    assert!(!chain.is_empty());
    for key in ["eps", "z_re", "z_im", "C", "D1", "D2", "D3"] {
        assert!(chain[0].get(key).is_some(), "chain key {key}");
    }
    assert_eq!(v["exponents"]["final_exponent"]["value"], -1.25);
    assert_eq!(v["exponents"]["final_exponent"]["exact"], "-5/4");
    // worked value of eps1
    let eps1 = v["ledger"]["eps1"].as_f64().unwrap();
    assert!((eps1 - 0.013165395982476525).abs() < 1e-12);
}

#[test]
fn current_scan_csv_has_contracted_header() {
    let d = out_dir("scan");
    let out = run(&[
        &["current", "--scan", "--points", "5",
          "--e-min", "0.75", "--e-max", "0.95", "--out", d.to_str().unwrap()][..],
        FAST,
    ]
    .concat());
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = fs::read_to_string(d.join("current_scan.csv")).unwrap();
    assert!(csv.starts_with("e,c\n"));
    assert_eq!(csv.lines().count(), 6);
    // 17 significant digits
    let first_value = csv.lines().nth(1).unwrap().split(',').next().unwrap();
    assert!(first_value.contains('e') && first_value.len() >= 20, "{first_value}");
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("current_scan.json")).unwrap()).unwrap();
    assert!(v.get("e_star_candidate").is_some());
    assert!(v["config"]["grid_points"].is_number());
}
