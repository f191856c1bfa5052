//! File formats and the command-line front end for `gridntl-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod io;
pub mod model;

pub use error::{AppError, AppResult};
