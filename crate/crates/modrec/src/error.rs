//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The kernel-weighted moment matrix is numerically degenerate at a query
    /// point: its smallest eigenvalue fell below the configured floor. Usually
    /// means the bandwidth is too small for the grid, or a boundary window is
    /// starved of points.
    #[error("design matrix ill-conditioned at x = {x}: min eigenvalue {min_eig:.3e} below floor {floor:.3e}")]
    IllConditioned { x: f64, min_eig: f64, floor: f64 },

    /// Not enough grid samples to build an interpolant of the requested degree.
    #[error("{got} samples are not enough for degree {degree} (need at least {needed})")]
    InsufficientSamples {
        got: usize,
        needed: usize,
        degree: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Wraps a lower-level error with the pipeline stage that produced it.
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("failed to parse {what}: {detail}")]
    Parse { what: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Tag this error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Short machine-readable tag, used in sweep result rows.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::InsufficientSamples { .. } => "insufficient_samples",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Stage { source, .. } => source.tag(),
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
