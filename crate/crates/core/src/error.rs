//! Error type shared by every module.

use std::path::PathBuf;

use thiserror::Error;

/// Failures raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// An input parameter lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A derivative order outside 1 to 3 was requested.
    #[error("unsupported derivative order {0} (expected 1 to 3)")]
    DerivativeOrder(u32),

    /// Two fields defined on different grids were combined.
    #[error("fields live on different grids")]
    GridMismatch,

    /// An operator symbol or a depth-like quantity lost positivity.
    #[error("positivity lost: {0}")]
    Positivity(String),

    /// The coefficient set has a non-positive evolution operator.
    #[error("coefficient set is not evolvable (evolution operator not positive)")]
    NonEvolvable,

    /// The requested time step exceeds the stability bound.
    #[error("time step {dt} exceeds the CFL bound {limit}")]
    CflViolation { dt: f64, limit: f64 },

    /// The scalar solution left the finite range.
    #[error("blow-up at t = {time}: max |w| = {max_abs}")]
    BlowUp { time: f64, max_abs: f64 },

    /// Conjugate gradients did not reach the requested tolerance.
    #[error("elliptic solve did not converge in {iterations} iterations (relative residual {residual:e})")]
    EllipticDivergence { iterations: usize, residual: f64 },

    /// A step failed; carries the time at which it happened.
    #[error("at t = {time}: {source}")]
    AtTime {
        time: f64,
        #[source]
        source: Box<Error>,
    },

    /// A fit or reduction had too little data.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Configuration errors, each carrying a line number when known.
    #[error("invalid configuration:\n{}", format_config_errors(.0))]
    Config(Vec<ConfigIssue>),

    /// Filesystem failure with path context.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Serialization failure while writing results.
    #[error("serialization error: {0}")]
    Serialization(String),
}

/// One configuration problem and where it was found.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ConfigIssue {
    /// 1-based line number, when the problem is tied to a line.
    pub line: Option<usize>,
    /// Key involved, when applicable.
    pub key: Option<String>,
    /// Human-readable description.
    pub message: String,
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "`{key}`: ")?;
        }
        write!(f, "{}", self.message)
    }
}

fn format_config_errors(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl Error {
    /// Wraps `self` with the simulation time at which it occurred.
    pub fn at_time(self, time: f64) -> Self {
        match self {
            Error::AtTime { .. } => self,
            other => Error::AtTime {
                time,
                source: Box::new(other),
            },
        }
    }

    /// The innermost error, looking through time annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code: 2 for configuration, 4 for i/o, 3 for numerics.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config(_) | Error::Domain(_) => 2,
            Error::Io { .. } | Error::Serialization(_) => 4,
            _ => 3,
        }
    }

    /// Short machine-readable category name.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            Error::Domain(_) => "domain",
            Error::DerivativeOrder(_) => "derivative-order",
            Error::GridMismatch => "grid-mismatch",
            Error::Positivity(_) => "positivity",
            Error::NonEvolvable => "non-evolvable",
            Error::CflViolation { .. } => "cfl-violation",
            Error::BlowUp { .. } => "blow-up",
            Error::EllipticDivergence { .. } => "elliptic-divergence",
            Error::AtTime { .. } => "numerical",
            Error::InsufficientData(_) => "insufficient-data",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Serialization(_) => "serialization",
        }
    }
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
