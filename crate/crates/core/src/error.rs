use thiserror::Error;

/// Errors raised across the library.
///
/// Precision failures are kept distinct from validation failures so that the
/// CLI can map them to different exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("precision insufficient: {0}")]
    Precision(String),

    #[error("point lies within its error bound of a boundary: {0}")]
    BoundaryAmbiguous(String),

    #[error("value {value} exceeds the certified range of depth {depth}")]
    OutOfRange { value: String, depth: usize },

    #[error("invalid numeration: {0}")]
    InvalidNumeration(String),

    #[error("enumeration too large: about {estimate} elements (limit {limit})")]
    TooLarge { estimate: f64, limit: f64 },

    #[error("rational input detected")]
    Rational,

    #[error("io: {0}")]
    Io(String),

    #[error("format: {0}")]
    Format(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }

    /// True for the precision family (raise `P` and retry).
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::Precision(_) | Error::BoundaryAmbiguous(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
