use std::fmt;

use tachyon_core::Error;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(String),
    MalformedCsv(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                Error::InvalidBeta { .. } | Error::InvalidContext(_) | Error::InvalidArgument(_) => 2,
                _ => 3,
            },
            CliError::Io(_) | CliError::MalformedCsv(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
            CliError::MalformedCsv(m) => write!(f, "malformed csv: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            CliError::Io(e.to_string())
        } else {
            CliError::MalformedCsv(e.to_string())
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
