//! Process-level error classification. Every failure funnels into one of
//! three classes so the exit code is meaningful to scripts:
//! 1 = usage, 2 = data, 3 = numerical.

use std::fmt;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Numerical(String),
}

pub type CliResult<T> = Result<T, Failure>;

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    /// Same class, message prefixed with the k the failure occurred at.
    pub fn at_k(self, k: usize) -> Failure {
        match self {
            Failure::Usage(m) => Failure::Usage(format!("at k={k}: {m}")),
            Failure::Data(m) => Failure::Data(format!("at k={k}: {m}")),
            Failure::Numerical(m) => Failure::Numerical(format!("at k={k}: {m}")),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<tailex::Error> for Failure {
    fn from(e: tailex::Error) -> Failure {
        let msg = e.to_string();
        match e.class() {
            tailex::ErrorClass::Usage => Failure::Usage(msg),
            tailex::ErrorClass::Data => Failure::Data(msg),
            tailex::ErrorClass::Numerical => Failure::Numerical(msg),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Failure {
        Failure::Data(format!("malformed input: {e}"))
    }
}

/// IO problems count as data errors: the file was the input.
impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Data(e.to_string())
    }
}
