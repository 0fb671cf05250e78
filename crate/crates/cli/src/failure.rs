//! Exit-code discipline: 0 ok, 1 user error, 2 runtime failure.

use std::fmt;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or invalid config, missing prerequisites.
    User(anyhow::Error),
    /// The pipeline itself failed (training, sampling, io mid-run).
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::User(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::User(e) | Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

pub type CommandResult = Result<(), Failure>;

pub trait IntoFailure<T> {
    fn user(self) -> Result<T, Failure>;
    fn runtime(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> IntoFailure<T> for Result<T, E> {
    fn user(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::User(e.into()))
    }

    fn runtime(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Runtime(e.into()))
    }
}

pub fn user_error(msg: impl Into<String>) -> Failure {
    Failure::User(anyhow::anyhow!(msg.into()))
}
