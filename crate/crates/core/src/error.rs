use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("vorticity has non-zero mean {mean:e} (max |omega| = {max_abs:e}); use the decomposed m/kinetic representation")]
    NonZeroMean { mean: f64, max_abs: f64 },
    #[error("invalid exponent p = {0}; need p >= 1")]
    InvalidExponent(f64),
    #[error("ball of radius {radius} around ({cx}, {cy}) leaves the box [-{half_width}, {half_width})^2")]
    BallOutsideBox { cx: f64, cy: f64, radius: f64, half_width: f64 },
    #[error("mollifier radius {epsilon} is below two grid spacings ({min})")]
    KernelUnderresolved { epsilon: f64, min: f64 },
    #[error("support radius {radius} exceeds a quarter of the box half-width ({max})")]
    SupportTooLarge { radius: f64, max: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("CFL violation at t = {time}: dt = {dt:e} exceeds 0.5*h/max|u| = {limit:e}")]
    CflViolation { time: f64, dt: f64, limit: f64 },
    #[error("vorticity reached the guard annulus at t = {time}: ratio {ratio:e} > tolerance {tol:e}")]
    BoundaryLeak { time: f64, ratio: f64, tol: f64 },
    #[error("time {0} is not a saved time")]
    TimeNotSaved(f64),
    #[error("viscous trajectory (nu = {0}); renormalized conservation only holds for nu = 0")]
    ViscousTrajectory(f64),
    #[error("bad weights: {0}")]
    BadWeights(String),
    #[error("atom {index} violates class {class}: {reason}")]
    ClassViolation { index: usize, class: String, reason: String },
    #[error("ensemble member {index}: {source}")]
    Member {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("snapshot format error: {0}")]
    Format(String),
    #[error("corrupt snapshot field: non-finite value at index {0}")]
    CorruptField(usize),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::GridMismatch(_) => "GridMismatch",
            Error::NonZeroMean { .. } => "NonZeroMean",
            Error::InvalidExponent(_) => "InvalidExponent",
            Error::BallOutsideBox { .. } => "BallOutsideBox",
            Error::KernelUnderresolved { .. } => "KernelUnderresolved",
            Error::SupportTooLarge { .. } => "SupportTooLarge",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::CflViolation { .. } => "CflViolation",
            Error::BoundaryLeak { .. } => "BoundaryLeak",
            Error::TimeNotSaved(_) => "TimeNotSaved",
            Error::ViscousTrajectory(_) => "ViscousTrajectory",
            Error::BadWeights(_) => "BadWeights",
            Error::ClassViolation { .. } => "ClassViolation",
            Error::Member { source, .. } => source.code(),
            Error::Format(_) => "FormatError",
            Error::CorruptField(_) => "CorruptField",
            Error::Io(_) => "IoError",
        }
    }

    /// Name of the subsystem the error originates from.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_)
            | Error::NonZeroMean { .. }
            | Error::InvalidExponent(_)
            | Error::BallOutsideBox { .. }
            | Error::KernelUnderresolved { .. } => "spectral-core",
            Error::SupportTooLarge { .. } => "radial-decomp",
            Error::CflViolation { .. }
            | Error::BoundaryLeak { .. }
            | Error::TimeNotSaved(_)
            | Error::ViscousTrajectory(_) => "flow-solver",
            Error::BadWeights(_) | Error::ClassViolation { .. } | Error::GridMismatch(_) => {
                "ensemble-measures"
            }
            Error::Member { source, .. } => source.module(),
            Error::Format(_) | Error::CorruptField(_) | Error::Io(_) => "snapshot",
            Error::InvalidArgument(_) => "core",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
