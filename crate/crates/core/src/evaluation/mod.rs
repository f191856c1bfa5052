//! Single-point AUC, stratified splits with fold-based model selection, and
//! the proportion × model × feature-set experiment matrix.

mod experiment;
mod metrics;
mod split;

pub use experiment::{
    prepare_proportion, run_experiment_matrix, summarize, ExperimentConfig, ExperimentOutput, PreparedProportion,
    ProportionInfo, SummaryRow, TaskFailure, DEFAULT_PROPORTIONS,
};
pub use metrics::{auc_single_point, ConfusionCounts, Metrics};
pub use split::{make_split, SplitPlan, DEFAULT_FOLDS, DEFAULT_TEST_FRACTION};

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, FeatureSet};
use crate::learners::{ModelKind, ModelParams, TrainedModel};
use crate::matrix::Matrix;
use crate::parallel;
use crate::seed::{self, Stage};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub model: ModelKind,
    pub feature_set: FeatureSet,
    pub train_proportion: f64,
    pub test_proportion: f64,
    pub auc: f64,
    pub recall: f64,
    pub specificity: f64,
    pub counts: ConfusionCounts,
    /// Fold whose model was selected.
    pub fold: usize,
    /// Root of the training seeds of the folds.
    pub seed: u64,
}

impl EvalReport {
    fn new(model: &Selected, train_proportion: f64, test_proportion: f64, m: Metrics) -> Self {
        Self {
            model: model.model.kind(),
            feature_set: model.feature_set,
            train_proportion,
            test_proportion,
            auc: m.auc,
            recall: m.recall,
            specificity: m.specificity,
            counts: m.counts,
            fold: model.fold,
            seed: model.seed,
        }
    }
}

/// Model chosen by cross-validation, with the data view it expects.
#[derive(Debug, Clone, PartialEq)]
pub struct Selected {
    pub model: TrainedModel,
    pub feature_set: FeatureSet,
    pub fold: usize,
    pub seed: u64,
    pub validation: Metrics,
    /// Validation metrics of every fold, in fold order.
    pub fold_metrics: Vec<Metrics>,
}

/// Labels `x` with the model's native decision rule and scores them.
pub fn evaluate_on_test(model: &TrainedModel, x: &Matrix, y: &[bool], workers: usize) -> Result<Metrics> {
    let predicted = model.predict(x, workers)?;
    auc_single_point(ConfusionCounts::from_predictions(&predicted, y)?)
}

/// Trains one model per fold of `plan`, scores each on its fold's
/// validation rows and keeps the best; equal AUCs keep the earlier fold.
/// Fold `f` trains with seed `derive(seed, Train, f)`.
pub fn cross_validated_train(
    matrix: &FeatureMatrix,
    plan: &SplitPlan,
    kind: ModelKind,
    feature_set: FeatureSet,
    params: &ModelParams,
    seed: u64,
    workers: usize,
) -> Result<Selected> {
    let outcomes = parallel::map_indexed(workers, plan.folds.len(), |f| -> Result<(TrainedModel, Metrics)> {
        let wrap = |e: Error| Error::Fold {
            fold: f,
            source: Box::new(e),
        };
        let (x, y) = matrix.view(feature_set, &plan.fold_train(f));
        let mut p = params.clone();
        p.train.seed = seed::derive(seed, Stage::Train, f as u64);
        let model = TrainedModel::train(kind, &x, &y, &p).map_err(wrap)?;
        let (vx, vy) = matrix.view(feature_set, plan.fold_validation(f));
        let m = evaluate_on_test(&model, &vx, &vy, 1).map_err(wrap)?;
        Ok((model, m))
    });
    let mut best: Option<(usize, TrainedModel, Metrics)> = None;
    let mut fold_metrics = Vec::with_capacity(outcomes.len());
    for (f, outcome) in outcomes.into_iter().enumerate() {
        let (model, m) = outcome?;
        fold_metrics.push(m);
        if best.as_ref().is_none_or(|b| m.auc > b.2.auc) {
            best = Some((f, model, m));
        }
    }
    let (fold, model, validation) = best.ok_or_else(|| Error::Split("split plan has no folds".into()))?;
    Ok(Selected {
        model,
        feature_set,
        fold,
        seed,
        validation,
        fold_metrics,
    })
}

/// Test-set report for a selected model on `matrix`'s `rows`.
pub fn report_on(
    selected: &Selected,
    matrix: &FeatureMatrix,
    rows: &[usize],
    train_proportion: f64,
    test_proportion: f64,
    workers: usize,
) -> Result<EvalReport> {
    let (x, y) = matrix.view(selected.feature_set, rows);
    let m = evaluate_on_test(&selected.model, &x, &y, workers)?;
    Ok(EvalReport::new(selected, train_proportion, test_proportion, m))
}
