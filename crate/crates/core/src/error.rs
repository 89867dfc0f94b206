use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A point sits on (or too close to) the sphere at infinity.
    NearIdealBoundary { norm: f64 },
    /// A mean curvature outside the admissible range for the requested object.
    CurvatureOutOfRange { h: f64, limit: f64 },
    /// A scalar argument violated its documented range.
    InvalidArgument(String),
    /// The ideal curve is self-intersecting, not star-shaped, or under-sampled.
    InvalidCurve(String),
    /// The mesh violates a structural invariant.
    InvalidMesh(String),
    /// No supporting circle could be found for the sampled curve.
    NoSupportingCircle,
    /// The energy minimization did not reach its tolerance.
    SolverFailed(SolverFailure),
}

/// Diagnostics attached to a failed solve; never a silent partial answer.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverFailure {
    pub h: f64,
    pub reason: String,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub residual_median: f64,
    pub energy: f64,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NearIdealBoundary { norm } => {
                write!(f, "point with norm {norm} is too close to the ideal boundary")
            }
            Error::CurvatureOutOfRange { h, limit } => {
                write!(f, "mean curvature {h} outside the admissible range |H| < {limit}")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidCurve(msg) => write!(f, "invalid ideal curve: {msg}"),
            Error::InvalidMesh(msg) => write!(f, "invalid mesh: {msg}"),
            Error::NoSupportingCircle => write!(f, "no supporting circle found for the sampled curve"),
            Error::SolverFailed(fail) => write!(
                f,
                "solver failed at H = {}: {} (iterations {}, gradient norm {:.3e}, median residual {:.3e})",
                fail.h, fail.reason, fail.iterations, fail.gradient_norm, fail.residual_median
            ),
        }
    }
}

impl core::error::Error for Error {}
