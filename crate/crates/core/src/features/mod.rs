//! Per-customer feature construction.
//!
//! Column layout of an assembled matrix, in order:
//!
//! 1. neighborhood: for each grid size ascending, `inspected_ratio_g{n}` then
//!    `ntl_ratio_g{n}`;
//! 2. consumption: `daily_kwh_m{k}` for `k = N-1 ..= 0` months before the
//!    anchor (oldest first);
//! 3. retained binary master-data indicators `{field}={token}` in canonical
//!    category order.
//!
//! Neighborhood and consumption columns are z-scored; binary columns stay 0/1.

mod assemble;
mod consumption;
mod normalize;
mod onehot;
mod pipeline;

pub use assemble::{assemble_matrix, Block, ColumnBlocks, FeatureMatrix, FeatureSet};
pub use consumption::{daily_average_consumption, ConsumptionFeatures, DEFAULT_MONTHS};
pub use normalize::{normalize, ColumnScaler, Normalizer};
pub use onehot::{
    binary_column_names, filter_binary_features, filter_binary_features_by_variance, one_hot_encode,
    ClassVocabulary, DEFAULT_VARIANCE_P,
};
pub use pipeline::{extract_features, FeatureConfig, FeaturePlan, RawFeatures};
