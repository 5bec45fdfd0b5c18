use std::fmt;

/// One problem found while validating a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// Dotted path of the offending key, e.g. `entry.sigma`.
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`: {}", self.key, self.message)
    }
}

#[derive(Debug)]
pub enum LabError {
    /// Invalid configuration or input; exit status 2.
    Config(Vec<ConfigError>),
    /// Solver failure during a run; exit status 3.
    Numerical(String),
    Io(std::io::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Numerical(_) => 3,
            LabError::Io(_) => 1,
        }
    }

    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Config(vec![ConfigError::new(key, message)])
    }
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::Config(errors) => {
                write!(
                    f,
                    "invalid configuration ({} error{})",
                    errors.len(),
                    if errors.len() == 1 { "" } else { "s" }
                )?;
                for e in errors {
                    write!(f, "\n  {e}")?;
                }
                Ok(())
            }
            LabError::Numerical(m) => write!(f, "{m}"),
            LabError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for LabError {}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e)
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Io(e.into())
    }
}

/// Core errors raised mid-run: input problems map to configuration errors,
/// solver and degeneracy failures to numerical ones.
impl From<deloc_core::Error> for LabError {
    fn from(e: deloc_core::Error) -> Self {
        use deloc_core::Error as E;
        match e {
            E::Spec { field, message } => LabError::config(field, message),
            E::Argument(m) | E::Unsupported(m) => LabError::config("<input>", m),
            E::Parse { line, message } => {
                LabError::config("edge_list", format!("line {line}: {message}"))
            }
            other @ (E::Numerical { .. } | E::Degenerate(_) | E::NoNonEdges) => {
                LabError::Numerical(other.to_string())
            }
        }
    }
}
