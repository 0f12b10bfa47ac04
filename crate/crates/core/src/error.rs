use thiserror::Error;

/// Errors raised anywhere in the fitting and sweep pipeline.
#[derive(Debug, Error)]
pub enum RfmError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// `K + λI` could not be factored; `pivot` is the smallest pivot reached.
    #[error("kernel system is not numerically positive definite (pivot {index} = {pivot:e})")]
    Singular { index: usize, pivot: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<RfmError>,
    },

    #[error("cell rep={rep} d={d}: {source}")]
    Cell {
        rep: usize,
        d: usize,
        #[source]
        source: Box<RfmError>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl RfmError {
    pub(crate) fn at_iteration(self, iteration: usize) -> Self {
        RfmError::Iteration {
            iteration,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, RfmError>;
