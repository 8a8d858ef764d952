use thiserror::Error;

/// Coarse failure class, used by batch front-ends to pick an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// The caller asked for something outside the operation's contract.
    Precondition,
    /// The inputs were acceptable but the numerics failed (non-convergence, leaks, ...).
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("kernel evaluated at its singular point x = x'")]
    SingularPoint,

    #[error("grid too small: matching radius {r_match} lies inside the potential range {range}")]
    GridTooSmall { r_match: f64, range: f64 },

    #[error("near-resonant energy: linear system singular at k = {k} (condition estimate {condition:.3e})")]
    NearResonance { k: f64, condition: f64 },

    #[error("partial-wave truncation threshold not reached at l_max = {l_max} (|delta| tail ~ {tail:.3e}); increase l_max")]
    TruncationNotReached { l_max: usize, tail: f64 },

    #[error("energy {energy} coincides with a discrete eigenvalue of the discretized Hamiltonian")]
    ExcludedEnergy { energy: f64 },

    #[error("box too small: half-width {half_width} < required {required} for horizon {horizon}")]
    BoxTooSmall { half_width: f64, required: f64, horizon: f64 },

    #[error("wavepacket leaked: boundary mass fraction {fraction:.3e} at t = {time}")]
    Leak { fraction: f64, time: f64 },

    #[error("unstable propagation: {0}")]
    Instability(String),

    #[error("bound-state capture: {fraction:.3e} of the norm stays near the scatterer")]
    BoundStateCapture { fraction: f64 },

    #[error("spectral parameter error: {0}")]
    SpectralParameter(String),

    #[error("root bracket failure: {0}; refine the grid")]
    RootBracket(String),

    #[error("discretization failure: {0}")]
    Discretization(String),

    #[error("grid resolution error: {0}")]
    GridResolution(String),

    #[error("horizon error: {0}")]
    Horizon(String),

    #[error("solver failure: {0}")]
    Solver(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidArgument(_)
            | Error::Domain(_)
            | Error::Precondition(_)
            | Error::SingularPoint
            | Error::GridTooSmall { .. }
            | Error::ExcludedEnergy { .. }
            | Error::BoxTooSmall { .. }
            | Error::SpectralParameter(_)
            | Error::TruncationNotReached { .. }
            | Error::Horizon(_) => ErrorClass::Precondition,
            Error::NearResonance { .. }
            | Error::Leak { .. }
            | Error::Instability(_)
            | Error::BoundStateCapture { .. }
            | Error::RootBracket(_)
            | Error::Discretization(_)
            | Error::GridResolution(_)
            | Error::Solver(_) => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
