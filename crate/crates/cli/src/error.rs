use std::fmt;

use multigof::{Error, Stage};

/// Failure classes with fixed process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Runtime,
    Unreadable,
    Estimation,
    InvalidConfig,
}

impl Failure {
    pub fn code(self) -> u8 {
        match self {
            Failure::Runtime => 1,
            Failure::Unreadable => 2,
            Failure::Estimation => 3,
            Failure::InvalidConfig => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: Failure,
    pub message: String,
}

impl CliError {
    pub fn new(kind: Failure, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::new(Failure::InvalidConfig, message)
    }

    pub fn unreadable(message: impl Into<String>) -> Self {
        CliError::new(Failure::Unreadable, message)
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError::new(Failure::Runtime, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = if e.is_estimation_failure() || e.stage() == Some(Stage::Estimation) {
            Failure::Estimation
        } else {
            match e.root() {
                Error::UnknownFamily(_)
                | Error::UnknownMethod(_)
                | Error::InvalidParams { .. }
                | Error::InvalidConfig(_)
                | Error::InsufficientSampleSize { .. } => Failure::InvalidConfig,
                Error::Io(_) | Error::Parse { .. } => Failure::Unreadable,
                _ => Failure::Runtime,
            }
        };
        CliError::new(kind, e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let est = Error::EstimationFailed("x".into()).at(Stage::Estimation);
        assert_eq!(CliError::from(est).kind, Failure::Estimation);
        let cfg = Error::UnknownFamily("foo".into()).at(Stage::Setup);
        assert_eq!(CliError::from(cfg).kind, Failure::InvalidConfig);
        let io = Error::Io("gone".into());
        assert_eq!(CliError::from(io).kind, Failure::Unreadable);
        let other = Error::Degenerate("x".into()).at(Stage::Simulation);
        assert_eq!(CliError::from(other).kind, Failure::Runtime);
        assert_eq!(
            [
                Failure::Runtime,
                Failure::Unreadable,
                Failure::Estimation,
                Failure::InvalidConfig
            ]
            .map(Failure::code),
            [1, 2, 3, 4]
        );
    }
}
