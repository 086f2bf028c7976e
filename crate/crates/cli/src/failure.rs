use std::fmt;

/// A failed command, carrying the process exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1.
    Verification(String),
    /// Exit 2.
    Invalid(String),
    /// Exit 3.
    SizeGuard(String),
    /// Exit 4.
    Io(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::SizeGuard(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Failure::Invalid(msg.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
            Failure::Invalid(m) | Failure::SizeGuard(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl From<treefid::Error> for Failure {
    fn from(e: treefid::Error) -> Self {
        match e {
            treefid::Error::SizeGuard { .. } => Failure::SizeGuard(e.to_string()),
            treefid::Error::InvalidParameter(m) => Failure::Invalid(m),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;
