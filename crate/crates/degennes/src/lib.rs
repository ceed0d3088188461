//! Spectral toolkit for the fibered magnetic Neumann Laplacian on a
//! half-plane: band functions of the half-line model operator
//! -d^2/dx^2 + (xi - x)^2, their minima and derivatives, edge-current
//! functionals, Agmon-weighted localization, and fully explicit Mourre /
//! limiting-absorption constants with a semiclassical scaling audit.

// validation deliberately writes `!(x > 0.0)` so NaN fails closed
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod band;
pub mod cli;
pub mod current;
pub mod error;
pub mod fit;
pub mod mourre;
pub mod quad;
pub mod report;
pub mod solver;
pub mod tridiag;

pub use band::{
    check_rappel, derivatives_at, find_minimum, inverse_branch, sample_band, BandContext,
    BandFunction, BandMinimum, BandSample, Branch, InverseValue,
};
pub use current::{
    agmon_report, algebraic_current, current_sign_scan, current_window, window_inf_abs_slope,
    AgmonReport, CurrentReport, CurrentScan,
};
pub use error::{Error, Result};
pub use mourre::{
    build_window, lap_bound, lap_bound_from_ledger, ledger, scaling_audit, scaling_exponents,
    unperturbed_mourre_constant, AuditOptions, ConstantsLedger, ExponentTable, Interval,
    LapBound, LapInputs, MourreHypotheses, ScalingAudit, SemiclassicalWindow, WindowParams,
};
pub use solver::{solve_fiber, DiscretizationConfig, Eigenpair, SolveDiagnostics};
