use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at evaluation point s = {0}")]
    PoleAtPoint(Complex64),

    #[error("division by the zero function")]
    DivisionByZero,

    #[error("root finding did not converge for a degree-{0} polynomial")]
    RootFinding(usize),

    #[error("invalid sweep specification: {0}")]
    InvalidSweep(String),

    #[error("ill-posed objective: {bad} of {total} grid evaluations are not finite")]
    IllPosedObjective { bad: usize, total: usize },

    #[error("infinite norm: pole on the imaginary axis at omega = {0}")]
    InfiniteNorm(f64),

    #[error("unbounded at infinity: transfer function is improper")]
    UnboundedAtInfinity,

    #[error("degenerate loop: characteristic polynomial is identically zero")]
    DegenerateLoop,

    #[error("systems are not comparable (half-plane censuses differ)")]
    Incomparable,

    #[error("invalid model: {0}")]
    Model(String),

    #[error("degenerate cable between {from} and {to}: R = L = 0")]
    DegenerateCable { from: String, to: String },

    #[error("formula {formula}: denominator is identically zero")]
    ZeroDenominator { formula: &'static str },

    #[error("partition violation: {param} changes paths {paths:?} outside J1")]
    PartitionViolation { param: String, paths: Vec<String> },

    #[error("improper closed loop: relative degree {0} < 0")]
    ImproperClosedLoop(i64),

    #[error("accuracy guard: dt = {dt} exceeds {limit}; use dt <= {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Validation errors are caused by bad input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::InvalidSweep(_)
                | Error::Config(_)
                | Error::PartitionViolation { .. }
                | Error::DegenerateCable { .. }
                | Error::Incomparable
                | Error::Io(_)
        )
    }
}
