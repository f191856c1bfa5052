//! Feature engineering, classifiers and evaluation for detecting
//! non-technical losses (electricity theft, meter tampering, billing errors)
//! from customer master data, meter readings and inspection outcomes.
//!
//! The pipeline:
//!
//! 1. [`dataset`]: record types, a seeded synthetic generator with planted
//!    geographic fraud clusters, and stratified proportion sampling.
//! 2. [`geogrid`]: coordinate outlier removal, bounding box, and per-cell
//!    inspected / NTL-found ratios at several grid resolutions.
//! 3. [`features`]: daily average consumption, one-hot master data with a
//!    Bernoulli-variance filter, z-score normalization and matrix assembly.
//! 4. [`diststats`]: per-class moments of the neighborhood features.
//! 5. [`learners`]: logistic regression, linear SVM, exact KNN and a random forest.
//! 6. [`evaluation`]: single-point AUC, stratified splits, 10-fold model
//!    selection and the cross-proportion experiment matrix.
//!
//! The crate is `no_std` and only needs `alloc`. The `parallel` feature
//! (which implies `std`) runs tree training, KNN queries, grid folds and
//! experiment tasks on a rayon pool; every result that is documented as
//! deterministic is identical regardless of the worker count.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod dataset;
pub mod diststats;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod geogrid;
pub mod learners;
pub mod matrix;
pub mod parallel;
pub mod seed;

pub use error::{Error, Result};
pub use matrix::Matrix;
