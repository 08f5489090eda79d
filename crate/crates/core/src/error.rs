use thiserror::Error;

/// Errors raised across the crate. Variants follow the failure classes each
/// operation can report: argument-range problems, broken contracts on inputs,
/// numerical degeneracy and configuration issues.
#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} outside range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate input: {0}")]
    Degeneracy(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("grid not commensurate with lattice: {0}")]
    Commensurability(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("time step {dt} exceeds stable bound {limit}")]
    TimeStep { dt: f64, limit: f64 },

    #[error("monotonicity alarm: value {value} escapes [{lo}, {hi}] at cell {cell}")]
    Monotonicity {
        value: f64,
        lo: f64,
        hi: f64,
        cell: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("construction failure: {0}")]
    Construction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
