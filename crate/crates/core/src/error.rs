use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed numeric input (non-finite coordinates, bad radii, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A point outside the domain of definition of a density or chart.
    #[error("outside domain: {0}")]
    OutsideDomain(String),

    #[error("undefined Hausdorff distance: {0}")]
    UndefinedHausdorff(&'static str),

    /// The base point is missing from some member of a domain sequence.
    #[error("sequence invariant violated: base point not interior to W_{n}")]
    BasePointMissing { n: usize },

    #[error("point lies on the singular set: {0}")]
    OnSingularSet(String),

    #[error("point is not on the singular set: {0}")]
    NotOnSingularSet(String),

    #[error("domain inclusion violated: {0}")]
    InclusionViolated(String),

    /// Compact samples that intersect the excluded set `S ∪ E`.
    #[error("compact set meets the excluded set at {count} sample(s), first at {first}")]
    CompactMeetsExcluded { count: usize, first: String },

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
