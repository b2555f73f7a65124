use std::fmt;

pub const EXIT_OK: u8 = 0;
pub const EXIT_UNCALIBRATED: u8 = 2;
pub const EXIT_ALERT: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_NUMERICAL: u8 = 70;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(m: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: m.into() }
    }

    pub fn data(m: impl Into<String>) -> Self {
        Self { code: EXIT_DATA, message: m.into() }
    }

    pub fn numerical(m: impl Into<String>) -> Self {
        Self { code: EXIT_NUMERICAL, message: m.into() }
    }

    pub fn io(path: &std::path::Path, e: impl fmt::Display) -> Self {
        Self::numerical(format!("{}: {e}", path.display()))
    }

    /// Errors raised while checking a dataset against a model.
    pub fn from_data(e: bayeschi::Error) -> Self {
        match e {
            bayeschi::Error::Domain(m) => Self::data(m),
            other => Self::from(other),
        }
    }
}

impl From<bayeschi::Error> for CliError {
    fn from(e: bayeschi::Error) -> Self {
        use bayeschi::Error::*;
        let code = match &e {
            Config(_) | Unsupported(_) => EXIT_USAGE,
            Domain(_) => EXIT_USAGE,
            Evaluation { .. } | Numerical(_) | NonConvergence { .. } | Sampler(_) => EXIT_NUMERICAL,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::numerical(format!("csv: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
