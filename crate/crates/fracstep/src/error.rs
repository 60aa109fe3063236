use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{0}")]
    Format(String),
    #[error("unknown id '{id}'{}", suggestion.as_ref().map(|s| format!(", did you mean '{s}'?")).unwrap_or_default())]
    UnknownId {
        id: String,
        suggestion: Option<String>,
    },
    #[error("diagnostic {index} ({kind}): {source}")]
    Diagnostic {
        index: usize,
        kind: String,
        #[source]
        source: fracstep_core::Error,
    },
    #[error(transparent)]
    Core(#[from] fracstep_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
