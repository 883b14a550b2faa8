use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Core(#[from] coinv_core::CoreError),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed expectations: {0}")]
    Expectations(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Group(String),
}

impl VerifyError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        VerifyError::Io { path: path.as_ref().display().to_string(), source }
    }
}
