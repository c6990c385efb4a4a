use thiserror::Error;

/// Errors raised by the numerical and Monte Carlo routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of the gamma function at rho = {0}")]
    Pole(f64),

    #[error("series failed to converge after {terms} terms (last term bound {bound:e})")]
    Convergence { terms: usize, bound: f64 },

    #[error("cancellation too large: max term / |sum| = {ratio:e}")]
    AccuracyLoss { ratio: f64 },

    #[error("result overflows f64")]
    Overflow,

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("Laplace inversion unstable: estimate {estimate:e}, oscillation {oscillation:e}")]
    InversionInstability { estimate: f64, oscillation: f64 },

    #[error("n_terms = {0} is unsupported (must be even and within the precision limit)")]
    InversionTerms(usize),

    #[error("grid horizon {horizon} too short for theta = {theta} (need >= {required})")]
    InsufficientHorizon {
        horizon: f64,
        theta: f64,
        required: f64,
    },

    #[error("time {t} lies beyond the simulated path (last value {last})")]
    HorizonExceeded { t: f64, last: f64 },

    #[error(
        "rejection acceptance rate {acceptance:.3} below 0.1 at dt = {dt}; use a smaller step"
    )]
    AcceptanceRate { acceptance: f64, dt: f64 },

    #[error("kernel table coverage: {0}")]
    TableCoverage(String),

    #[error("kernel table invariant violated at k^2 = {k_sq}, t = {t}: {what}")]
    InvariantViolation { k_sq: u64, t: f64, what: String },

    #[error("empty sample")]
    EmptySample,

    #[error("renewal count exceeded {0} events")]
    RunawayRenewal(u64),

    #[error("step too large: Richardson estimates {coarse:e} and {fine:e} disagree")]
    StepTooLarge { coarse: f64, fine: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
