use thiserror::Error;

/// Every failure the library can report.
///
/// Rates, states and grids are validated at module boundaries; the
/// numerical kernels themselves are total on validated input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not hermitian: max|M - M^H| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {eigenvalue:.6e}")]
    NotPositiveSemidefinite { eigenvalue: f64 },

    #[error("rate `{name}` must be nonnegative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("frequency `{name}` must be positive, got {value}")]
    NonPositiveFrequency { name: &'static str, value: f64 },

    #[error("rate or frequency `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error(
        "detailed balance (KMS) violated: w/gamma = {ratio:.12} but tanh(beta*omega) = {expected:.12}"
    )]
    DetailedBalance { ratio: f64, expected: f64 },

    #[error(
        "weak-coupling propagator undefined: 4*omega_tilde^2 - 4*b^2 - (a - alpha)^2 = {radicand:.6e} is not positive"
    )]
    StrongCoupling { radicand: f64 },

    #[error(
        "correlation samples do not decay: channel {channel} ends at {tail:.3e} against peak {peak:.3e}"
    )]
    UndampedCorrelations {
        channel: &'static str,
        tail: f64,
        peak: f64,
    },

    #[error("correlation grid invalid: {detail}")]
    BadSampleGrid { detail: String },

    #[error("family constraint violated: {constraint}")]
    FamilyConstraint { constraint: String },

    #[error("state is not physical: {detail}")]
    UnphysicalState { detail: String },

    #[error("trace must be 1, got {trace:.12}")]
    Normalization { trace: f64 },

    #[error("operation requires zero temperature (w = gamma), got w/gamma = {ratio:.12}")]
    FiniteTemperature { ratio: f64 },

    #[error("no unique equilibrium state: gamma = 0")]
    NoEquilibrium,

    #[error("time grid too coarse: step {step:.6e} exceeds pi/(20*Omega) = {bound:.6e}")]
    GridTooCoarse { step: f64, bound: f64 },

    #[error("time grid must be nonempty, start at t >= 0 and be strictly increasing")]
    BadTimeGrid,

    #[error("{context}: {detail}")]
    InvalidInput { context: String, detail: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
