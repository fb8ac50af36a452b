use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: bad parameters, unparsable files, violated type invariants.
    Config,
    /// Well-formed input asking for something the estimators refuse to do
    /// (scales below the atomization cutoff, too few scales, ...).
    Precondition,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: String, reason: String },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("dimension mismatch: expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("atom cap exceeded: {requested} atoms requested, limit is {limit}")]
    AtomCap { requested: usize, limit: usize },

    #[error(
        "scale window [{requested_min:.6e}, {requested_max:.6e}] is outside the admissible window \
         [{admissible_min:.6e}, {admissible_max:.6e}]"
    )]
    ScaleWindow {
        requested_min: f64,
        requested_max: f64,
        admissible_min: f64,
        admissible_max: f64,
    },

    #[error("only {found} usable scales, need at least {required}")]
    TooFewScales { found: usize, required: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::ScaleWindow { .. } | Error::TooFewScales { .. } | Error::Precondition(_) => {
                ErrorKind::Precondition
            }
            Error::Io(_) => ErrorKind::Io,
            Error::Context { source, .. } => source.kind(),
            _ => ErrorKind::Config,
        }
    }
}

pub(crate) trait ResultExt<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T>;
}

impl<T> ResultExt<T> for Result<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| e.context(context()))
    }
}
