//! Run configuration.
//!
//! Every setting has one key, usable both as a `--key value` flag and as a
//! `key = value` line in a config file (`#` starts a comment). Precedence,
//! highest first: flag, `GRIDNTL_WORKERS` (workers only), config file,
//! built-in default.

use std::path::{Path, PathBuf};

use gridntl_core::dataset::SyntheticConfig;
use gridntl_core::evaluation::{ExperimentConfig, DEFAULT_FOLDS, DEFAULT_TEST_FRACTION, DEFAULT_PROPORTIONS};
use gridntl_core::features::{ClassVocabulary, FeatureConfig, FeatureSet, DEFAULT_MONTHS, DEFAULT_VARIANCE_P};
use gridntl_core::geogrid::{OutlierRule, SelfInclusion, DEFAULT_GRID_SIZES, DEFAULT_K_SIGMA};
use gridntl_core::learners::{Distance, ModelKind, ModelParams, TrainConfig, DEFAULT_C, DEFAULT_K, DEFAULT_TREES};
use gridntl_core::seed::{self, Stage};

use crate::error::{AppError, AppResult, Context};

pub const WORKERS_ENV: &str = "GRIDNTL_WORKERS";

/// `(key, help)` for every setting, in echo order.
pub const KEYS: &[(&str, &str)] = &[
    ("data", "dataset directory (customers.csv, readings.csv, inspections.csv)"),
    ("out", "output directory"),
    ("seed", "root seed; every stage derives its own seed from it"),
    ("workers", "worker threads"),
    ("num-customers", "synthetic customers to generate"),
    ("num-months", "months of synthetic readings"),
    ("cluster-count", "planted fraud clusters"),
    ("include-other-class", "generate customers of class `other` (true/false)"),
    ("grids", "cells per axis of each neighborhood grid, comma separated"),
    ("months", "months of daily average consumption per customer"),
    ("variance-p", "binary feature filter threshold p"),
    ("vocabulary", "customer class vocabulary: seven or eight"),
    ("self-inclusion", "count a customer's own inspection in its cell: include or exclude"),
    ("k-sigma", "coordinate outlier cutoff in standard deviations (inf disables)"),
    ("outlier-rule", "per_axis or radial"),
    ("c", "inverse regularization of LR and SVM"),
    ("k", "neighbors for KNN"),
    ("distance", "KNN distance: euclidean, manhattan or cosine"),
    ("trees", "random forest size"),
    ("learning-rate", "initial SGD step"),
    ("batch-size", "SGD minibatch size"),
    ("epochs", "maximum SGD epochs"),
    ("tolerance", "stop SGD when the objective moves less than this"),
    ("proportions", "NTL proportions, comma separated"),
    ("sample-size", "inspections per proportion sample"),
    ("models", "model kinds, comma separated: lr, knn, svm, rf"),
    ("feature-sets", "time_series_only, all_features, comma separated"),
    ("folds", "cross-validation folds"),
    ("test-fraction", "held-out test share per class"),
    ("proportion", "NTL proportion for sample, train and evaluate"),
    ("model", "model kind for train"),
    ("feature-set", "feature set for train"),
    ("model-file", "model bundle path for train and evaluate"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub workers: usize,
    pub num_customers: usize,
    pub num_months: usize,
    pub cluster_count: usize,
    pub include_other_class: bool,
    pub grids: Vec<usize>,
    pub months: usize,
    pub variance_p: f64,
    pub vocabulary: ClassVocabulary,
    pub self_inclusion: SelfInclusion,
    pub k_sigma: f64,
    pub outlier_rule: OutlierRule,
    pub c: f64,
    pub k: usize,
    pub distance: Distance,
    pub trees: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub tolerance: f64,
    pub proportions: Vec<f64>,
    pub sample_size: usize,
    pub models: Vec<ModelKind>,
    pub feature_sets: Vec<FeatureSet>,
    pub folds: usize,
    pub test_fraction: f64,
    pub proportion: f64,
    pub model: ModelKind,
    pub feature_set: FeatureSet,
    pub model_file: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        Self {
            data: PathBuf::from("data"),
            out: PathBuf::from("out"),
            seed: 42,
            workers: 1,
            num_customers: 20_000,
            num_months: 24,
            cluster_count: 40,
            include_other_class: false,
            grids: DEFAULT_GRID_SIZES.to_vec(),
            months: DEFAULT_MONTHS,
            variance_p: DEFAULT_VARIANCE_P,
            vocabulary: ClassVocabulary::Seven,
            self_inclusion: SelfInclusion::Include,
            k_sigma: DEFAULT_K_SIGMA,
            outlier_rule: OutlierRule::PerAxis,
            c: DEFAULT_C,
            k: DEFAULT_K,
            distance: Distance::Euclidean,
            trees: DEFAULT_TREES,
            learning_rate: train.learning_rate,
            batch_size: train.batch_size,
            epochs: train.epochs,
            tolerance: train.tolerance,
            proportions: DEFAULT_PROPORTIONS.to_vec(),
            sample_size: 2000,
            models: ModelKind::ALL.to_vec(),
            feature_sets: FeatureSet::ALL.to_vec(),
            folds: DEFAULT_FOLDS,
            test_fraction: DEFAULT_TEST_FRACTION,
            proportion: 0.1,
            model: ModelKind::Logistic,
            feature_set: FeatureSet::AllFeatures,
            model_file: PathBuf::from("model.txt"),
        }
    }
}

fn num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse `{v}`"))
}

fn list<T>(v: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(item).collect()
}

fn token<T>(v: &str, from: impl Fn(&str) -> Option<T>) -> Result<T, String> {
    from(v).ok_or_else(|| format!("unknown value `{v}`"))
}

fn float(v: &str) -> Result<f64, String> {
    match v {
        "inf" => Ok(f64::INFINITY),
        _ => num(v),
    }
}

fn join<T>(xs: &[T], f: impl Fn(&T) -> String) -> String {
    xs.iter().map(f).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let v = v.trim();
        match key {
            "data" => self.data = PathBuf::from(v),
            "out" => self.out = PathBuf::from(v),
            "seed" => self.seed = num(v)?,
            "workers" => self.workers = num(v)?,
            "num-customers" => self.num_customers = num(v)?,
            "num-months" => self.num_months = num(v)?,
            "cluster-count" => self.cluster_count = num(v)?,
            "include-other-class" => self.include_other_class = num(v)?,
            "grids" => self.grids = list(v, num)?,
            "months" => self.months = num(v)?,
            "variance-p" => self.variance_p = num(v)?,
            "vocabulary" => self.vocabulary = token(v, ClassVocabulary::from_token)?,
            "self-inclusion" => self.self_inclusion = token(v, SelfInclusion::from_token)?,
            "k-sigma" => self.k_sigma = float(v)?,
            "outlier-rule" => self.outlier_rule = token(v, OutlierRule::from_token)?,
            "c" => self.c = num(v)?,
            "k" => self.k = num(v)?,
            "distance" => self.distance = token(v, Distance::from_token)?,
            "trees" => self.trees = num(v)?,
            "learning-rate" => self.learning_rate = num(v)?,
            "batch-size" => self.batch_size = num(v)?,
            "epochs" => self.epochs = num(v)?,
            "tolerance" => self.tolerance = num(v)?,
            "proportions" => self.proportions = list(v, num)?,
            "sample-size" => self.sample_size = num(v)?,
            "models" => self.models = list(v, |s| token(s, ModelKind::from_token))?,
            "feature-sets" => self.feature_sets = list(v, |s| token(s, FeatureSet::from_token))?,
            "folds" => self.folds = num(v)?,
            "test-fraction" => self.test_fraction = num(v)?,
            "proportion" => self.proportion = num(v)?,
            "model" => self.model = token(v, ModelKind::from_token)?,
            "feature-set" => self.feature_set = token(v, FeatureSet::from_token)?,
            "model-file" => self.model_file = PathBuf::from(v),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Current value of every key, in [`KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let values = [
            self.data.display().to_string(),
            self.out.display().to_string(),
            self.seed.to_string(),
            self.workers.to_string(),
            self.num_customers.to_string(),
            self.num_months.to_string(),
            self.cluster_count.to_string(),
            self.include_other_class.to_string(),
            join(&self.grids, ToString::to_string),
            self.months.to_string(),
            self.variance_p.to_string(),
            self.vocabulary.token().to_string(),
            self.self_inclusion.token().to_string(),
            self.k_sigma.to_string(),
            self.outlier_rule.token().to_string(),
            self.c.to_string(),
            self.k.to_string(),
            self.distance.token().to_string(),
            self.trees.to_string(),
            self.learning_rate.to_string(),
            self.batch_size.to_string(),
            self.epochs.to_string(),
            self.tolerance.to_string(),
            join(&self.proportions, ToString::to_string),
            self.sample_size.to_string(),
            join(&self.models, |m| m.token().to_string()),
            join(&self.feature_sets, |f| f.token().to_string()),
            self.folds.to_string(),
            self.test_fraction.to_string(),
            self.proportion.to_string(),
            self.model.token().to_string(),
            self.feature_set.token().to_string(),
            self.model_file.display().to_string(),
        ];
        KEYS.iter().map(|(k, _)| *k).zip(values).collect()
    }

    /// The configuration as a config file.
    pub fn to_text(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn apply_text(&mut self, path: &Path, text: &str) -> AppResult<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| AppError::parse(path, i as u64 + 1, "expected `key = value`"))?;
            self.set(k.trim(), v)
                .map_err(|m| AppError::parse(path, i as u64 + 1, format!("{}: {m}", k.trim())))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> AppResult<()> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        self.apply_text(path, &text)
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            batch_size: self.batch_size,
            epochs: self.epochs,
            tolerance: self.tolerance,
            seed: 0,
            workers: self.workers,
        }
    }

    /// Generator settings; the generator seed is derived from the root seed.
    pub fn synthetic(&self) -> SyntheticConfig {
        SyntheticConfig {
            num_customers: self.num_customers,
            num_months: self.num_months,
            cluster_count: self.cluster_count,
            include_other_class: self.include_other_class,
            seed: seed::derive(self.seed, Stage::Generate, 0),
            ..SyntheticConfig::default()
        }
    }

    pub fn features(&self) -> FeatureConfig {
        FeatureConfig {
            grid_sizes: self.grids.clone(),
            months: self.months,
            variance_p: self.variance_p,
            vocabulary: self.vocabulary,
            inclusion: self.self_inclusion,
            workers: self.workers,
        }
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            proportions: self.proportions.clone(),
            sample_size: self.sample_size,
            models: self.models.clone(),
            feature_sets: self.feature_sets.clone(),
            features: self.features(),
            k_sigma: self.k_sigma,
            outlier_rule: self.outlier_rule,
            params: ModelParams {
                c: self.c,
                k: self.k,
                distance: self.distance,
                trees: self.trees,
                train: self.train_config(),
            },
            folds: self.folds,
            test_fraction: self.test_fraction,
            seed: self.seed,
            workers: self.workers,
        }
    }

    /// Index of `proportion` among `proportions`, which keys its sample and
    /// split seeds; proportions outside the list use the next free index.
    pub fn proportion_index(&self) -> usize {
        self.proportions
            .iter()
            .position(|q| *q == self.proportion)
            .unwrap_or(self.proportions.len())
    }

    /// Checks every module's preconditions up front.
    pub fn validate(&self) -> AppResult<()> {
        self.synthetic().validate().context(|| "generator settings".into())?;
        self.experiment().validate().context(|| "experiment settings".into())?;
        if !(self.proportion > 0.0 && self.proportion < 1.0) {
            return Err(AppError::Usage(format!("proportion must lie in (0, 1), got {}", self.proportion)));
        }
        if self.folds < 2 || !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(AppError::Usage("folds must be at least 2 and test-fraction in (0, 1)".into()));
        }
        Ok(())
    }
}
