use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("distance between dipole and qubit site is below {threshold_nm} nm")]
    ZeroDistance { threshold_nm: f64 },
    #[error("layer region has zero area in x or y")]
    DegenerateLayer,
    #[error("auto spectrum vanishes at {frequency_hz} Hz; normalized cross spectrum undefined")]
    DegenerateSpectrum { frequency_hz: f64 },
    #[error("frequency range [{lo}, {hi}] is empty or outside the grid")]
    EmptyRange { lo: f64, hi: f64 },
    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    QuadratureFailure { tolerance: f64, estimate: f64 },
    #[error("A_x has the same sign at both ends of the bracket [{lo}, {hi}] nm")]
    NoBracket { lo: f64, hi: f64 },
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("candidate grid does not cover [{lo}, {hi}] Hz")]
    GridCoverage { lo: f64, hi: f64 },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("every hypothesis has zero likelihood")]
    AllRejected,
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
