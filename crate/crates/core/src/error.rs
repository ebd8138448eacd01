use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid shape parameter `{name}`: {reason}")]
    InvalidShape { name: &'static str, reason: String },

    #[error(
        "{component} support [{lo:.6}, {hi:.6}] does not fit the unpadded grid [{x_min:.6}, {x_max:.6}]; \
         extend x_min/x_max to cover it"
    )]
    SupportOverflow {
        component: &'static str,
        lo: f64,
        hi: f64,
        x_min: f64,
        x_max: f64,
    },

    #[error("{what} = {value} is not a lattice point (h = {h})")]
    OffLattice { what: &'static str, value: f64, h: f64 },

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite sample at index {index} (t = {t}); the solver has diverged")]
    NonFinite { index: usize, t: f64 },

    #[error(
        "fixed-point iteration did not converge at t = {t}, node {node} after {iterations} iterations \
         (last update {last_update:e}); h is too large for the data amplitude"
    )]
    FixedPointDiverged {
        t: f64,
        node: usize,
        iterations: u32,
        last_update: f64,
    },

    #[error("amplitude {amplitude:e} exceeded the blow-up guard at t = {t}")]
    BlowUp { t: f64, amplitude: f64 },

    #[error("scheme `{scheme}` is not usable here: {reason}")]
    UnsupportedScheme { scheme: &'static str, reason: String },

    #[error("no snapshot recorded at t = {t}")]
    MissingSnapshot { t: f64 },

    #[error("no characteristic trace checkpoint at t = {t}")]
    MissingTrace { t: f64 },

    #[error("invalid triangle region: {0}")]
    InvalidRegion(String),

    #[error("invalid configuration:{}", format_issues(.0))]
    InvalidConfig(Vec<ConfigIssue>),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

/// One violation found while validating a configuration, with the key it
/// concerns (`record_times[2]`, `x_max`, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub key: String,
    pub message: String,
}

impl ConfigIssue {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

fn format_issues(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("\n  {i}")).collect()
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
