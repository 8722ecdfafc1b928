use std::fmt;

/// Failure classes with stable process exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable or invalid configuration, bad arguments, unwritable output.
    Config(String),
    /// A computed state broke a physical invariant beyond tolerance.
    Invariant(String),
    /// A fit or regression could not be performed on the computed data.
    Analysis(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Invariant(_) => 2,
            CliError::Analysis(_) => 3,
        }
    }

    /// Sorts a library error into the class it signals at this level.
    pub fn from_core(e: spincat::Error) -> Self {
        use spincat::Error as E;
        match e {
            E::NotHermitian(_) | E::BadTrace(_) | E::NotPositive(_) | E::Eigen => CliError::Invariant(e.to_string()),
            E::Fit(msg) => CliError::Analysis(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violation: {m}"),
            CliError::Analysis(m) => write!(f, "analysis failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_codes() {
        assert_eq!(CliError::from_core(spincat::Error::NotPositive(-1e-3)).exit_code(), 2);
        assert_eq!(CliError::from_core(spincat::Error::Fit("flat".into())).exit_code(), 3);
        assert_eq!(CliError::from_core(spincat::Error::OverlappingSubsets(2)).exit_code(), 1);
    }
}
