use std::fmt;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A value handed to an operation does not satisfy its precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The probability set fails one or more consistency checks.
    #[error("inconsistent probability set: {}", ViolationList(.0))]
    Inconsistent(Vec<Violation>),

    /// The eight independent probabilities do not extend to a valid box.
    #[error("independent probabilities do not extend to a valid box: {0}")]
    InfeasibleIndependentSet(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The simplex hit a numerically unusable pivot or failed to converge.
    #[error("degenerate linear system: {0}")]
    Degenerate(String),

    /// `line` is 1-based; 0 refers to the document as a whole.
    #[error("{}", parse_message(.line, .message))]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

fn parse_message(line: &usize, message: &str) -> String {
    if *line == 0 {
        message.to_string()
    } else {
        format!("line {line}: {message}")
    }
}

struct ViolationList<'a>(&'a [Violation]);

impl fmt::Display for ViolationList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
