use thiserror::Error;

use crate::trajfile::TrajectoryFileError;

/// Everything that can stop a run. `exit_code` maps each to 1 or 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("config error at line {line}, column {column}: {message}")]
    Schema { line: usize, column: usize, message: String },
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("cannot read config {path}: {source}")]
    ConfigRead { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
    #[error("{0}")]
    Trajectory(#[from] TrajectoryFileError),
    #[error("{0}")]
    Core(nlslab_core::Error),
}

impl CliError {
    pub fn invalid(field: &str, reason: impl Into<String>) -> Self {
        Self::Invalid { field: field.to_string(), reason: reason.into() }
    }

    pub fn output(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Output { path: path.display().to_string(), source }
    }

    /// 2 for anything wrong with the inputs, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        use nlslab_core::Error as E;
        match self {
            Self::Syntax { .. } | Self::Schema { .. } | Self::Invalid { .. } | Self::ConfigRead { .. } => 2,
            Self::Core(
                E::BadPoints(_)
                | E::BadLength(_)
                | E::LengthMismatch { .. }
                | E::GridMismatch
                | E::NotDyadic(_)
                | E::InvalidParameter { .. }
                | E::SchemeMismatch { .. }
                | E::IncompatibleGrids(_),
            ) => 2,
            Self::Core(_) | Self::Output { .. } | Self::Trajectory(_) => 1,
        }
    }
}

impl From<nlslab_core::Error> for CliError {
    fn from(e: nlslab_core::Error) -> Self {
        Self::Core(e)
    }
}
