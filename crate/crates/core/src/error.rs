use thiserror::Error;

/// Errors raised by the reduction library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("matrix is not Hurwitz (largest real part of an eigenvalue is {max_real_eig:e})")]
    NotHurwitz { max_real_eig: f64 },

    #[error("Sylvester equation is singular: eigenvalues of A and -B coincide")]
    SpectrumClash,

    #[error("matrix has an eigenvalue on the closed negative real axis ({0})")]
    BranchCut(String),

    #[error("resolvent t(M - I) + I is singular at t = {t}")]
    SingularResolvent { t: f64 },

    #[error("i*omega is an eigenvalue of A at omega = {omega}")]
    SingularAtFrequency { omega: f64 },

    #[error("unbounded frequency band requires zero feedthrough in the error system")]
    UnboundedBandWithFeedthrough,

    #[error("frequency band is empty")]
    EmptyBand,

    #[error("invalid frequency band: {0}")]
    InvalidBand(String),

    #[error("overlapping frequency intervals: {0}")]
    BandOverlap(String),

    #[error("invalid reduced order {order} for a model with {states} states")]
    InvalidOrder { order: usize, states: usize },

    #[error("Gramian product is rank deficient: singular value {index} is {value:e}")]
    RankDeficientGramian { index: usize, value: f64 },

    #[error("initial reduced model is unstable (largest real part {max_real_eig:e})")]
    UnstableInit { max_real_eig: f64 },

    #[error("invalid structure mask: {0}")]
    InvalidMask(String),

    #[error("invalid optimizer options: {0}")]
    InvalidOptions(String),

    #[error("eigenvalue iteration failed to converge")]
    NoConvergence,

    #[error("parse error in {location}: {message}")]
    Parse { location: String, message: String },

    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
