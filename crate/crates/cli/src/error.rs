use std::fmt;

/// Failure classes, one per exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Validation(String),
    Numeric(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<toddsum::Error> for CliError {
    fn from(e: toddsum::Error) -> Self {
        use toddsum::Error::*;
        let msg = e.to_string();
        match e {
            Syntax { .. } | UnknownIdentifier { .. } | Arity { .. } | Invalid(_) => CliError::Config(msg),
            ZeroVector
            | Dependent
            | NonRegular
            | NotPrimitive { .. }
            | Unbounded
            | Infeasible
            | NotFullDimensional
            | RedundantFacet { .. }
            | NonSimple { .. }
            | CombinatorialChange
            | NotHomogeneous { .. } => CliError::Validation(msg),
            Singular | DivisionByZero | NonConvergence { .. } | NotReal { .. } | IllConditioned { .. } => {
                CliError::Numeric(msg)
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
