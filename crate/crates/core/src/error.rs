use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A physical parameter or derived quantity violates its admissibility range.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("F has no admissible second root: M+ = {mach} < 1")]
    NoSecondRoot { mach: f64 },

    #[error("no stationary solution exists for these boundary data")]
    NonExistent,

    #[error("stationary profile lost monotonicity at x = {x}; refine the step")]
    StepTooCoarse { x: f64 },

    #[error("domain too short: |chi(L) - 1| = {deviation:e} exceeds tolerance {tolerance:e}")]
    DomainTooShort { deviation: f64, tolerance: f64 },

    #[error("decay envelope violated: constant {constant:e} exceeds cap {cap:e}")]
    EnvelopeViolated { constant: f64, cap: f64 },

    #[error("stationary bound `{which}` violated at x = {x}")]
    BoundViolated { which: &'static str, x: f64 },

    #[error("density became nonpositive at x = {x} (t = {t})")]
    PositivityLost { x: f64, t: f64 },

    #[error("non-finite value in field `{field}` at x = {x} (t = {t})")]
    NonFiniteField { field: &'static str, x: f64, t: f64 },

    #[error("perturbation does not vanish at x = 0 (b(0) = {value:e})")]
    CompatibilityViolated { value: f64 },

    #[error("need at least {needed} snapshots, got {got}")]
    InsufficientSnapshots { needed: usize, got: usize },

    #[error("fit window holds {got} samples after burn-in, need at least {needed}")]
    WindowTooSmall { needed: usize, got: usize },

    #[error("nonpositive norm {value:e} at t = {t} inside the fit window")]
    NonpositiveNorm { t: f64, value: f64 },

    #[error("grids do not match")]
    GridMismatch,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("{0}")]
    Io(String),

    #[error("csv: {0}")]
    Csv(String),
}

impl Error {
    /// True for errors caused by the input (configuration, parameters or
    /// incompatible initial data) rather than by the computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParam { .. }
                | Error::Parse { .. }
                | Error::Validation(_)
                | Error::CompatibilityViolated { .. }
                | Error::DomainTooShort { .. }
                | Error::StepTooCoarse { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
