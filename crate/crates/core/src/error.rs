use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty population")]
    EmptyPopulation,
    #[error("unlabeled sample in metric computation")]
    UnlabeledSample,
    #[error("degenerate ROC: one class absent")]
    DegenerateRoc,
    #[error("degenerate PR: no positives")]
    DegeneratePr,
    #[error("positivity violation: {0}")]
    Positivity(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("missing scenario: {0}")]
    MissingScenario(String),
    #[error("population file line {line}: {message}")]
    PopulationFile { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] CsvError),
}

/// Wrapper so `Error` can stay `Clone + PartialEq`.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct CsvError(pub String);

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(CsvError(e.to_string()))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
