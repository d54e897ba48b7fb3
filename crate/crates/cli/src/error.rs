use std::fmt;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    Args(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Args(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Args(m) => write!(f, "invalid arguments: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

impl From<qwalls::Error> for CliError {
    fn from(e: qwalls::Error) -> Self {
        use qwalls::Error as E;
        match e {
            E::RootNotConverged { .. }
            | E::BoundaryViolation { .. }
            | E::InsufficientModes { .. }
            | E::LinearSolve { .. }
            | E::ReferenceTooSmall { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Args(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Args(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let numeric = CliError::from(qwalls::Error::RootNotConverged { lo: 0.0, hi: 1.0 });
        assert_eq!(numeric.exit_code(), 3);
        assert_eq!(CliError::from(qwalls::Error::ReferenceTooSmall { defect: 1.0 }).exit_code(), 3);
        assert_eq!(CliError::from(qwalls::Error::Domain("x".into())).exit_code(), 2);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(CliError::from(io).exit_code(), 4);
    }
}
