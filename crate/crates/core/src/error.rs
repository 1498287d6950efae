use thiserror::Error;

/// Everything that can go wrong in the exact engines, the simulator and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("outside the domain of {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("capacity exceeded: {what} is {got}, cap is {cap}")]
    Capacity { what: &'static str, got: u64, cap: u64 },

    /// A proven identity or invariant failed. Seeing this means a bug.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    /// A pathwise coupling produced a trial where the dominated process finished later.
    #[error("coupling violation in trial {trial}: {detail}")]
    Coupling { trial: u64, detail: String },

    #[error("model file line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Domain { .. } | Error::Parse { .. } => 2,
            Error::Capacity { .. } => 3,
            Error::Consistency(_) | Error::Coupling { .. } => 4,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
