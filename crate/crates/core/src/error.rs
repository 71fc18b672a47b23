use thiserror::Error;

/// Failure modes shared by the catalog, the models and the projection engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("validation failed for {subject}: {message}")]
    Validation { subject: String, message: String },

    #[error("{spec}: no tabulated state at {state} (states are never interpolated)")]
    MissingState { spec: String, state: String },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate kernel `{0}`: zero instructions executed")]
    DegenerateKernel(String),

    #[error("inconsistent counters for `{kernel}`: {message}")]
    InconsistentCounters { kernel: String, message: String },

    #[error("loop `{0}` is memory-only and carries no work")]
    NoWork(String),

    #[error("loop `{0}` has neither an intensity nor bytes per iteration")]
    UnderspecifiedLoop(String),

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),

    #[error("configuration error in binding `{binding}`: {message}")]
    Configuration { binding: String, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            subject: subject.into(),
            message: message.into(),
        }
    }

    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn config(binding: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Configuration {
            binding: binding.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by how a run was configured (unknown names,
    /// untabulated states, unresolvable bindings) rather than by bad data.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::MissingState { .. } | Error::Unknown { .. } | Error::Configuration { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Deserializes JSON, reporting failures with the offending path.
pub(crate) fn from_json_str<'de, D: serde::Deserialize<'de>>(text: &'de str) -> Result<D> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::parse(path, e.into_inner().to_string())
    })
}
