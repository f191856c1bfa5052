use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{cross_validated_train, make_split, report_on, EvalReport, Selected, SplitPlan};
use crate::dataset::{sample_proportion, Dataset};
use crate::diststats::{per_class_feature_moments, ClassMoments};
use crate::error::{Error, Result};
use crate::features::{extract_features, FeatureConfig, FeatureMatrix, FeaturePlan, FeatureSet, RawFeatures};
use crate::geogrid::{self, OutlierRule, DEFAULT_K_SIGMA};
use crate::learners::{ModelKind, ModelParams};
use crate::parallel;
use crate::seed::{self, Stage};

pub const DEFAULT_PROPORTIONS: [f64; 14] = [
    0.01, 0.02, 0.03, 0.04, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9,
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub proportions: Vec<f64>,
    /// Inspections drawn per proportion.
    pub sample_size: usize,
    pub models: Vec<ModelKind>,
    pub feature_sets: Vec<FeatureSet>,
    pub features: FeatureConfig,
    pub k_sigma: f64,
    pub outlier_rule: OutlierRule,
    pub params: ModelParams,
    pub folds: usize,
    pub test_fraction: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            proportions: DEFAULT_PROPORTIONS.to_vec(),
            sample_size: 2000,
            models: ModelKind::ALL.to_vec(),
            feature_sets: FeatureSet::ALL.to_vec(),
            features: FeatureConfig::default(),
            k_sigma: DEFAULT_K_SIGMA,
            outlier_rule: OutlierRule::PerAxis,
            params: ModelParams::default(),
            folds: super::DEFAULT_FOLDS,
            test_fraction: super::DEFAULT_TEST_FRACTION,
            seed: 42,
            workers: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.features.validate()?;
        self.params.train.validate()?;
        if self.proportions.is_empty() || self.models.is_empty() || self.feature_sets.is_empty() {
            return Err(Error::Config("proportions, models and feature sets must be non-empty".into()));
        }
        if let Some(q) = self.proportions.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
            return Err(Error::Config(format!("proportions must lie in (0, 1), got {q}")));
        }
        if self.sample_size < 20 {
            return Err(Error::Config(format!("sample size must be at least 20, got {}", self.sample_size)));
        }
        if !(self.k_sigma >= 0.0) {
            return Err(Error::Config(format!("k_sigma must be non-negative, got {}", self.k_sigma)));
        }
        if !(self.params.c > 0.0) || self.params.k == 0 || self.params.trees == 0 {
            return Err(Error::Config("C, K and the tree count must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(())
    }
}

/// One proportion sample, featurized and split.
#[derive(Debug, Clone)]
pub struct PreparedProportion {
    pub proportion: f64,
    pub sample_seed: u64,
    pub raw: RawFeatures,
    pub split: SplitPlan,
    /// Binary filter over the whole sample, scalers over the non-test pool.
    pub plan: FeaturePlan,
    pub matrix: FeatureMatrix,
}

/// Samples proportion `proportion` (the `index`-th of the run) from an
/// outlier-free dataset, featurizes, splits and normalizes it.
pub fn prepare_proportion(
    dataset: &Dataset,
    proportion: f64,
    index: usize,
    config: &ExperimentConfig,
) -> Result<PreparedProportion> {
    let sample_seed = seed::derive(config.seed, Stage::Sample, index as u64);
    let sample = sample_proportion(dataset, proportion, config.sample_size, sample_seed)?;
    let raw = extract_features(&sample, &config.features)?;
    let targets: Vec<bool> = raw.targets.iter().map(|t| t.1).collect();
    let split = make_split(
        &targets,
        config.folds,
        config.test_fraction,
        seed::derive(config.seed, Stage::Split, index as u64),
    )?;
    let plan = FeaturePlan::fit(&raw, config.features.variance_p, Some(&split.pool), config.features.workers)?;
    let matrix = plan.apply(&raw)?;
    Ok(PreparedProportion {
        proportion,
        sample_seed,
        raw,
        split,
        plan,
        matrix,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskFailure {
    pub task: String,
    pub message: String,
}

/// Spread of one model's AUCs.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub model: ModelKind,
    pub count: usize,
    pub max_auc: f64,
    pub min_auc: f64,
    pub mean_auc: f64,
    /// Population standard deviation.
    pub std_auc: f64,
}

/// Per-model max, min, mean and population std of the AUCs in `reports`,
/// in the order of `models`. Models without reports are skipped.
pub fn summarize(reports: &[EvalReport], models: &[ModelKind]) -> Vec<SummaryRow> {
    models
        .iter()
        .filter_map(|&model| {
            let aucs: Vec<f64> = reports.iter().filter(|r| r.model == model).map(|r| r.auc).collect();
            if aucs.is_empty() {
                return None;
            }
            let n = aucs.len() as f64;
            let mean = aucs.iter().sum::<f64>() / n;
            let var = aucs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
            Some(SummaryRow {
                model,
                count: aucs.len(),
                max_auc: aucs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                min_auc: aucs.iter().copied().fold(f64::INFINITY, f64::min),
                mean_auc: mean,
                std_auc: libm::sqrt(var),
            })
        })
        .collect()
}

/// Per-proportion facts worth logging.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionInfo {
    pub proportion: f64,
    pub rows: usize,
    pub positives: usize,
    pub columns: Vec<String>,
    pub retained_binary: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    /// Trained and tested on the same proportion, ordered by model, feature
    /// set, then proportion.
    pub reports: Vec<EvalReport>,
    /// Best all-features model per kind tested on every proportion.
    pub cross: Vec<EvalReport>,
    /// Summary of `cross` per model.
    pub summary: Vec<SummaryRow>,
    pub moments: Vec<ClassMoments>,
    pub proportions: Vec<ProportionInfo>,
    pub removed_outliers: usize,
    pub failures: Vec<TaskFailure>,
}

fn position<T: PartialEq>(all: &[T], x: &T) -> u64 {
    all.iter().position(|a| a == x).unwrap_or(0) as u64
}

/// Runs the whole experiment. Outliers are removed once from `dataset`;
/// each proportion is then sampled, featurized and split independently.
/// Task failures are collected rather than aborting the run; only an
/// invalid configuration or a failed outlier pass is an error.
///
/// Tasks run in parallel, each single-threaded inside, so results do not
/// depend on `workers`.
pub fn run_experiment_matrix(dataset: &Dataset, config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let (clean, removed) = geogrid::drop_coordinate_outliers(dataset, config.k_sigma, config.outlier_rule)?;
    let mut out = ExperimentOutput {
        removed_outliers: removed.len(),
        ..ExperimentOutput::default()
    };
    let mut inner = config.clone();
    inner.features.workers = 1;
    inner.params.train.workers = 1;

    let prepared_all = parallel::map_indexed(config.workers, config.proportions.len(), |i| {
        prepare_proportion(&clean, config.proportions[i], i, &inner)
    });
    let mut prepared: Vec<(usize, PreparedProportion)> = Vec::new();
    for (i, p) in prepared_all.into_iter().enumerate() {
        match p {
            Ok(p) => prepared.push((i, p)),
            Err(e) => out.failures.push(TaskFailure {
                task: format!("prepare proportion {}", config.proportions[i]),
                message: e.to_string(),
            }),
        }
    }
    for (_, p) in &prepared {
        out.proportions.push(ProportionInfo {
            proportion: p.proportion,
            rows: p.matrix.targets.len(),
            positives: p.matrix.targets.iter().filter(|t| **t).count(),
            columns: p.matrix.columns.clone(),
            retained_binary: p.plan.retained_binary.len(),
        });
        out.moments.extend(per_class_feature_moments(&p.raw, p.proportion));
    }

    let mut tasks = Vec::new();
    for &model in &config.models {
        for &set in &config.feature_sets {
            for slot in 0..prepared.len() {
                tasks.push((model, set, slot));
            }
        }
    }
    let results = parallel::map_indexed(config.workers, tasks.len(), |t| -> Result<(Selected, EvalReport)> {
        let (model, set, slot) = tasks[t];
        let (index, p) = &prepared[slot];
        let key = ((*index as u64 * 4 + position(&ModelKind::ALL, &model)) * 2) + position(&FeatureSet::ALL, &set);
        let train_seed = seed::derive(config.seed, Stage::Train, key);
        let selected = cross_validated_train(&p.matrix, &p.split, model, set, &inner.params, train_seed, 1)?;
        let report = report_on(&selected, &p.matrix, &p.split.test, p.proportion, p.proportion, 1)?;
        Ok((selected, report))
    });
    let mut best: Vec<Option<(usize, Selected, f64)>> = alloc::vec![None; config.models.len()];
    for (t, r) in results.into_iter().enumerate() {
        let (model, set, slot) = tasks[t];
        match r {
            Ok((selected, report)) => {
                if set == FeatureSet::AllFeatures {
                    let m = config.models.iter().position(|k| *k == model).unwrap_or(0);
                    if best[m].as_ref().is_none_or(|b| report.auc > b.2) {
                        best[m] = Some((slot, selected, report.auc));
                    }
                }
                out.reports.push(report);
            }
            Err(e) => out.failures.push(TaskFailure {
                task: format!(
                    "train {} {} at proportion {}",
                    model.token(),
                    set.token(),
                    prepared[slot].1.proportion
                ),
                message: e.to_string(),
            }),
        }
    }

    let cross_tasks: Vec<(usize, usize)> = best
        .iter()
        .enumerate()
        .filter(|(_, b)| b.is_some())
        .flat_map(|(m, _)| (0..prepared.len()).map(move |q| (m, q)))
        .collect();
    let cross = parallel::map_indexed(config.workers, cross_tasks.len(), |t| -> Result<EvalReport> {
        let (m, q) = cross_tasks[t];
        let (slot, selected, _) = best[m].as_ref().ok_or_else(|| Error::Degenerate("no selected model".into()))?;
        let source = &prepared[*slot].1;
        let target = &prepared[q].1;
        let matrix = if *slot == q {
            target.matrix.clone()
        } else {
            source.plan.apply(&target.raw)?
        };
        report_on(selected, &matrix, &target.split.test, source.proportion, target.proportion, 1)
    });
    for (t, r) in cross.into_iter().enumerate() {
        match r {
            Ok(report) => out.cross.push(report),
            Err(e) => {
                let (m, q) = cross_tasks[t];
                out.failures.push(TaskFailure {
                    task: format!(
                        "cross-test {} at proportion {}",
                        config.models[m].token(),
                        prepared[q].1.proportion
                    ),
                    message: e.to_string(),
                });
            }
        }
    }
    out.summary = summarize(&out.cross, &config.models);
    Ok(out)
}
