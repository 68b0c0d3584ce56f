use std::path::PathBuf;

use thiserror::Error;

/// Coarse error classes with stable machine-readable codes.
///
/// The CLI maps these onto its exit codes; test harnesses assert on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Parse,
    Validation,
    UncoveredPoint,
    Io,
}

impl ErrorCategory {
    pub fn code(self) -> &'static str {
        match self {
            ErrorCategory::Parse => "parse",
            ErrorCategory::Validation => "validation",
            ErrorCategory::UncoveredPoint => "uncovered-point",
            ErrorCategory::Io => "io",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("point outside chart domain: {0}")]
    OutOfChart(String),

    #[error("point {point:?} lies outside the patch (geodesic distance {distance} > radius {radius})")]
    OutsidePatch {
        point: Vec<f64>,
        distance: f64,
        radius: f64,
    },

    #[error("invalid node set: nodes {first} and {second} coincide")]
    DuplicateNode { first: usize, second: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inconsistent Taylor data: {0}")]
    InconsistentData(String),

    #[error("multi-index {index} is not in the derivative set of node {node}")]
    InvalidIndex { node: usize, index: String },

    #[error("no node within delta = {delta} of point {point:?}")]
    Uncovered { point: Vec<f64>, delta: f64 },

    #[error("finite-difference step {step} must be below {limit} (half the minimum node separation)")]
    StepTooLarge { step: f64, limit: f64 },

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error("derivative order {requested} exceeds the available maximum {max}")]
    OrderExceeded { requested: u32, max: u32 },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{} point(s) failed, first at index {}: {}", .0.len(), .0[0].0, .0[0].1)]
    Batch(Vec<(usize, Error)>),

    #[error("level {level}: {source}")]
    Level {
        level: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Parse { .. } => ErrorCategory::Parse,
            Error::Io { .. } => ErrorCategory::Io,
            Error::Uncovered { .. } => ErrorCategory::UncoveredPoint,
            Error::Batch(failures) => {
                if failures
                    .iter()
                    .any(|(_, e)| e.category() == ErrorCategory::UncoveredPoint)
                {
                    ErrorCategory::UncoveredPoint
                } else {
                    failures
                        .first()
                        .map_or(ErrorCategory::Validation, |(_, e)| e.category())
                }
            }
            Error::Level { source, .. } => source.category(),
            _ => ErrorCategory::Validation,
        }
    }

    /// Indices of batch points that failed because no node covered them.
    pub fn uncovered_indices(&self) -> Vec<usize> {
        match self {
            Error::Batch(failures) => failures
                .iter()
                .filter(|(_, e)| matches!(e, Error::Uncovered { .. }))
                .map(|(i, _)| *i)
                .collect(),
            Error::Level { source, .. } => source.uncovered_indices(),
            _ => Vec::new(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
