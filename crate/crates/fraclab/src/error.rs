use thiserror::Error;

/// Errors of the command-line layer; [`LabError::exit_code`] maps them to the
/// process exit status.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("format error: {0}")]
    Format(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] fraclab_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        use fraclab_core::Error as E;
        match self {
            LabError::Usage(_) => 1,
            LabError::Config(_) | LabError::Format(_) | LabError::Io(_) | LabError::Json(_) => 2,
            LabError::Core(E::Domain(_) | E::Config(_)) => 2,
            LabError::Core(_) | LabError::Numerical(_) => 3,
        }
    }
}
