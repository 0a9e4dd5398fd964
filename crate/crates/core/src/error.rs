use std::path::PathBuf;

use num_complex::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// `tan z = -lambda` has no solution because `tan` omits `±i`.
    #[error("no fixed points: tan z = -lambda has no solution for lambda = {lambda}")]
    NoFixedPoints { lambda: Complex64 },

    #[error("{map} is not defined at y = {y}")]
    Domain { map: &'static str, y: f64 },

    #[error("invalid evaluation limits: {0}")]
    InvalidLimits(String),

    #[error("invalid classifier configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid range: lo = {lo} exceeds hi = {hi}")]
    InvalidRange { lo: i64, hi: i64 },

    #[error("unknown check `{name}`; registered checks: {}", registered.join(", "))]
    UnknownCheck {
        name: String,
        registered: Vec<&'static str>,
    },

    #[error("failed to build worker pool: {0}")]
    WorkerPool(String),

    #[error("i/o error on {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to serialize report: {0}")]
    Json(#[from] serde_json::Error),
}
