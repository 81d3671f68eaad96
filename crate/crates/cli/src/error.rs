use std::fmt;

use oscmap::io::IoError;
use oscmap::jet_math::ParseError;
use oscmap::ode_oracle::OracleError;
use oscmap::range_relations::RangeError;
use oscmap::tdho_core::TdhoError;
use oscmap::tunneling::TunnelError;

/// Failure of a subcommand. The variant fixes the process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Monotonicity(String),
    Io(String),
    TunnelMiss(String),
    RangeFailed(String),
    VerifyFailed(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Monotonicity(_) => 3,
            CliError::Io(_) => 4,
            CliError::TunnelMiss(_) => 5,
            CliError::RangeFailed(_) => 6,
            CliError::VerifyFailed(_) => 7,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Monotonicity(m) | CliError::Io(m) => f.write_str(m),
            CliError::TunnelMiss(m) | CliError::RangeFailed(m) | CliError::VerifyFailed(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(format!("phase expression: {e}"))
    }
}

impl From<TdhoError> for CliError {
    fn from(e: TdhoError) -> Self {
        match e {
            TdhoError::PhaseNotMonotone { .. } => CliError::Monotonicity(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<TunnelError> for CliError {
    fn from(e: TunnelError) -> Self {
        match e {
            TunnelError::MonotonicityViolated { .. } => CliError::Monotonicity(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<RangeError> for CliError {
    fn from(e: RangeError) -> Self {
        match e {
            RangeError::Tdho(inner) => inner.into(),
            RangeError::Cell { source, .. }
                if matches!(
                    *source,
                    RangeError::Tdho(TdhoError::PhaseNotMonotone { .. })
                ) =>
            {
                CliError::Monotonicity(source.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::VerifyFailed(format!("integration oracle: {e}"))
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match &e {
            IoError::Io { .. } => CliError::Io(e.to_string()),
            IoError::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => {
                CliError::Io(e.to_string())
            }
            IoError::Json(j) if j.is_io() => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
