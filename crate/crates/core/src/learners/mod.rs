//! The four classifiers.
//!
//! Every model emits a score in `[0, 1]` per row (positive-class probability,
//! positive-neighbor fraction, positive-vote fraction, or squashed SVM margin)
//! and a label from its native decision rule. Ties on the rule's boundary go
//! to the negative (no-NTL) class.

mod forest;
mod knn;
mod linear;

pub use forest::{predict_forest, train_forest, DecisionTree, ForestModel, Node};
pub use knn::{neighbors, predict_knn, train_knn, Distance, KnnModel};
pub use linear::{
    objective, objective_gradient, predict_logistic, sigmoid, svm_margins, train_logistic, train_svm_linear,
    LinearModel, LossKind,
};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_C: f64 = 1.0;
pub const DEFAULT_K: usize = 100;
/// Desk-scale default; the reference configuration uses 1000 trees.
pub const DEFAULT_TREES: usize = 100;

/// Optimizer and execution settings shared by the learners.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Initial step size; epoch `e` (0-based) uses `learning_rate / sqrt(e + 1)`.
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Training stops once the epoch-over-epoch objective change is below this.
    pub tolerance: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            batch_size: 64,
            epochs: 100,
            tolerance: 1e-6,
            seed: 0,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if self.batch_size == 0 || self.epochs == 0 || self.workers == 0 {
            return Err(Error::Config("batch size, epochs and workers must be positive".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::Config("tolerance must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    Logistic,
    Knn,
    Svm,
    Forest,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Logistic, ModelKind::Knn, ModelKind::Svm, ModelKind::Forest];

    pub fn token(self) -> &'static str {
        match self {
            ModelKind::Logistic => "lr",
            ModelKind::Knn => "knn",
            ModelKind::Svm => "svm",
            ModelKind::Forest => "rf",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.token() == s)
    }
}

/// Hyperparameters for all four model kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Inverse regularization for LR and SVM.
    pub c: f64,
    pub k: usize,
    pub distance: Distance,
    pub trees: usize,
    pub train: TrainConfig,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            c: DEFAULT_C,
            k: DEFAULT_K,
            distance: Distance::Euclidean,
            trees: DEFAULT_TREES,
            train: TrainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Logistic(LinearModel),
    Knn(KnnModel),
    Svm(LinearModel),
    Forest(ForestModel),
}

impl TrainedModel {
    pub fn train(kind: ModelKind, x: &Matrix, y: &[bool], params: &ModelParams) -> Result<Self> {
        Ok(match kind {
            ModelKind::Logistic => TrainedModel::Logistic(train_logistic(x, y, params.c, &params.train)?),
            ModelKind::Svm => TrainedModel::Svm(train_svm_linear(x, y, params.c, &params.train)?),
            ModelKind::Knn => TrainedModel::Knn(train_knn(x, y, params.k.min(x.rows()), params.distance)?),
            ModelKind::Forest => TrainedModel::Forest(train_forest(x, y, params.trees, &params.train)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::Logistic(_) => ModelKind::Logistic,
            TrainedModel::Knn(_) => ModelKind::Knn,
            TrainedModel::Svm(_) => ModelKind::Svm,
            TrainedModel::Forest(_) => ModelKind::Forest,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::Logistic(m) | TrainedModel::Svm(m) => m.weights.len(),
            TrainedModel::Knn(m) => m.data.cols(),
            TrainedModel::Forest(m) => m.n_features,
        }
    }

    /// Scores in `[0, 1]`, higher meaning more likely NTL.
    pub fn scores(&self, x: &Matrix, workers: usize) -> Result<Vec<f64>> {
        match self {
            TrainedModel::Logistic(m) => predict_logistic(m, x),
            TrainedModel::Svm(m) => Ok(svm_margins(m, x)?.into_iter().map(sigmoid).collect()),
            TrainedModel::Knn(m) => predict_knn(m, x, workers),
            TrainedModel::Forest(m) => predict_forest(m, x, workers),
        }
    }

    /// Labels from each model's native rule: probability, neighbor fraction
    /// or vote fraction above 0.5, SVM margin above 0.
    pub fn predict(&self, x: &Matrix, workers: usize) -> Result<Vec<bool>> {
        match self {
            TrainedModel::Svm(m) => Ok(svm_margins(m, x)?.into_iter().map(|v| v > 0.0).collect()),
            _ => Ok(self.scores(x, workers)?.into_iter().map(|s| s > 0.5).collect()),
        }
    }
}
