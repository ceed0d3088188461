use thiserror::Error;

/// Failure modes of the fiber solver and the derived analyses.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("eigensolve stalled: estimated error {estimated:.3e} above target {target:.3e}")]
    NotConverged { estimated: f64, target: f64 },

    #[error(
        "domain truncation dominates: boundary mass {mass:.3e} exceeds {threshold:.3e} \
         after repeated domain extension"
    )]
    TruncationDominated { mass: f64, threshold: f64 },

    #[error("band derivative does not change sign over the sampled range")]
    NoBracket,

    #[error("energy {e} outside the admissible range [{lo}, {hi})")]
    EnergyOutOfRange { e: f64, lo: f64, hi: f64 },

    #[error("spectral window has an empty or degenerate preimage")]
    WindowEmpty,

    #[error("finite-difference step {step:.3e} under the noise floor {floor:.3e}")]
    StepUnderflow { step: f64, floor: f64 },

    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("power-law fit unstable: max log residual {residual:.3e}")]
    FitUnstable { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
