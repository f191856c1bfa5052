use alloc::boxed::Box;
use alloc::string::String;

use crate::dataset::CustomerId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("referential integrity violated: {0}")]
    Integrity(String),

    #[error("cannot sample {label} inspections: need {needed}, only {available} available")]
    Sampling {
        label: &'static str,
        needed: usize,
        available: usize,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("customer {customer} at ({longitude}, {latitude}) lies outside the grid bounding box")]
    Assignment {
        customer: CustomerId,
        longitude: f64,
        latitude: f64,
    },

    #[error("unknown category token {token:?} for {field}")]
    Encoding { field: &'static str, token: String },

    #[error("feature alignment mismatch: {0}")]
    Alignment(String),

    #[error("shape mismatch: expected {expected} columns, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Divergence { epoch: usize, loss: f64 },

    #[error("metric undefined: {0}")]
    MetricUndefined(&'static str),

    #[error("cannot split sample: {0}")]
    Split(String),

    #[error("fold {fold}: {source}")]
    Fold { fold: usize, source: Box<Error> },
}
