use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::{CustomerId, Dataset};
use crate::error::{Error, Result};
use crate::features::assemble::{assemble_matrix, Block, FeatureMatrix};
use crate::features::consumption::{daily_average_consumption, DEFAULT_MONTHS};
use crate::features::normalize::Normalizer;
use crate::features::onehot::{
    binary_column_names, filter_binary_features, one_hot_encode, ClassVocabulary, DEFAULT_VARIANCE_P,
};
use crate::geogrid::{self, Grid, Labels, SelfInclusion, DEFAULT_GRID_SIZES};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    /// Cells per axis, one grid per entry.
    pub grid_sizes: Vec<usize>,
    pub months: usize,
    pub variance_p: f64,
    pub vocabulary: ClassVocabulary,
    pub inclusion: SelfInclusion,
    pub workers: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            grid_sizes: DEFAULT_GRID_SIZES.to_vec(),
            months: DEFAULT_MONTHS,
            variance_p: DEFAULT_VARIANCE_P,
            vocabulary: ClassVocabulary::Seven,
            inclusion: SelfInclusion::Include,
            workers: 1,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_sizes.is_empty() || self.grid_sizes.contains(&0) {
            return Err(Error::Config("grid sizes must be a non-empty list of positive integers".into()));
        }
        if self.months == 0 {
            return Err(Error::Config("months must be at least 1".into()));
        }
        if !(self.variance_p > 0.5 && self.variance_p <= 1.0) {
            return Err(Error::Config(format!(
                "variance threshold p must be in (0.5, 1], got {}",
                self.variance_p
            )));
        }
        Ok(())
    }
}

/// Unnormalized features of every inspected customer of one sample, before
/// any binary column is dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFeatures {
    /// Inspected customers by id with their latest label.
    pub targets: Vec<(CustomerId, bool)>,
    pub neighborhood: Block,
    pub consumption: Block,
    /// All one-hot indicators.
    pub binary: Block,
    pub grids: Vec<Grid>,
    pub missing_months: BTreeMap<CustomerId, usize>,
    pub flagged: Vec<CustomerId>,
}

impl RawFeatures {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Full one-hot matrix in target order.
    pub fn binary_matrix(&self) -> Matrix {
        let width = self.binary.width();
        let mut m = Matrix::zeros(self.targets.len(), width);
        for (i, (id, _)) in self.targets.iter().enumerate() {
            m.row_mut(i).copy_from_slice(&self.binary.rows[id]);
        }
        m
    }

    /// Raw neighborhood column `j` in target order.
    pub fn neighborhood_column(&self, j: usize) -> Vec<f64> {
        self.targets.iter().map(|(id, _)| self.neighborhood.rows[id][j]).collect()
    }
}

/// Neighborhood, consumption and one-hot features for the inspected
/// customers of `sample`. Grids are built over every customer of the sample;
/// coordinates should already be cleaned of outliers.
pub fn extract_features(sample: &Dataset, config: &FeatureConfig) -> Result<RawFeatures> {
    config.validate()?;
    let latest = sample.latest_inspections();
    let labels: Labels = latest.iter().map(|(id, i)| (*id, i.ntl_found)).collect();
    let targets: Vec<(CustomerId, bool)> = labels.iter().map(|(k, v)| (*k, *v)).collect();

    let mut sizes = config.grid_sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let grids = geogrid::build_grids(sample.customers(), &labels, &sizes, config.workers)?;

    let inspected: Vec<_> = sample
        .customers()
        .iter()
        .filter(|c| labels.contains_key(&c.id))
        .cloned()
        .collect();
    let hood = geogrid::assign_neighborhood_features(&inspected, &grids, &labels, config.inclusion)?;
    let mut neighborhood = Block {
        names: sizes
            .iter()
            .flat_map(|n| [format!("inspected_ratio_g{n}"), format!("ntl_ratio_g{n}")])
            .collect(),
        rows: BTreeMap::new(),
    };
    for (c, f) in inspected.iter().zip(hood) {
        neighborhood.rows.insert(c.id, f.0);
    }

    let by_customer = sample.readings_by_customer();
    let mut consumption = Block {
        names: (0..config.months)
            .rev()
            .map(|k| format!("daily_kwh_m{k}"))
            .collect(),
        rows: BTreeMap::new(),
    };
    let mut missing_months = BTreeMap::new();
    let mut flagged = Vec::new();
    for (id, insp) in &latest {
        let readings = by_customer.get(id).map(Vec::as_slice).unwrap_or(&[]);
        let f = daily_average_consumption(readings, insp.date, config.months);
        if f.flagged {
            flagged.push(*id);
        }
        if f.missing_months > 0 {
            missing_months.insert(*id, f.missing_months);
        }
        consumption.rows.insert(*id, f.values);
    }

    let onehot = one_hot_encode(&inspected, config.vocabulary)?;
    let binary = Block {
        names: binary_column_names(config.vocabulary),
        rows: inspected
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id, onehot.row(i).to_vec()))
            .collect(),
    };

    Ok(RawFeatures {
        targets,
        neighborhood,
        consumption,
        binary,
        grids,
        missing_months,
        flagged,
    })
}

/// Which binary columns survive the variance filter and how continuous
/// columns are scaled. Fitted on one sample, applicable to any sample
/// featurized with the same grid sizes, window and vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturePlan {
    /// Indices into the full one-hot vocabulary.
    pub retained_binary: Vec<usize>,
    pub normalizer: Normalizer,
    pub columns: Vec<String>,
}

impl FeaturePlan {
    /// Binary filter over every row of `raw`; scalers over `fit_rows` only
    /// (all rows when `None`).
    pub fn fit(raw: &RawFeatures, variance_p: f64, fit_rows: Option<&[usize]>, workers: usize) -> Result<Self> {
        let retained_binary = filter_binary_features(&raw.binary_matrix(), variance_p)?;
        let unscaled = assemble(raw, &retained_binary)?;
        let fit_data = match fit_rows {
            Some(rows) => unscaled.data.select_rows(rows),
            None => unscaled.data.clone(),
        };
        let normalizer = Normalizer::fit(&fit_data, &unscaled.continuous_columns(), workers);
        Ok(Self {
            retained_binary,
            normalizer,
            columns: unscaled.columns,
        })
    }

    /// Assembled and normalized matrix for every inspected customer of `raw`.
    pub fn apply(&self, raw: &RawFeatures) -> Result<FeatureMatrix> {
        let mut m = assemble(raw, &self.retained_binary)?;
        if m.columns != self.columns {
            return Err(Error::Alignment(format!(
                "feature plan expects columns {:?}, sample produced {:?}",
                self.columns, m.columns
            )));
        }
        self.normalizer.apply(&mut m.data);
        Ok(m)
    }
}

fn assemble(raw: &RawFeatures, retained: &[usize]) -> Result<FeatureMatrix> {
    let binary = Block {
        names: retained.iter().map(|&j| raw.binary.names[j].clone()).collect(),
        rows: raw
            .binary
            .rows
            .iter()
            .map(|(id, row)| (*id, retained.iter().map(|&j| row[j]).collect()))
            .collect(),
    };
    assemble_matrix(&raw.neighborhood, &raw.consumption, &binary, &raw.targets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, sample_proportion, SyntheticConfig};
    use crate::features::FeatureSet;

    fn sample() -> Dataset {
        let ds = generate_synthetic(&SyntheticConfig {
            num_customers: 3000,
            outlier_fraction: 0.0,
            ..SyntheticConfig::default()
        })
        .unwrap();
        sample_proportion(&ds, 0.3, 500, 1).unwrap()
    }

    #[test]
    fn matrix_shape_and_normalization() {
        let s = sample();
        let cfg = FeatureConfig::default();
        let raw = extract_features(&s, &cfg).unwrap();
        assert_eq!(raw.len(), 500);
        let plan = FeaturePlan::fit(&raw, cfg.variance_p, None, 1).unwrap();
        let m = plan.apply(&raw).unwrap();
        assert_eq!(m.data.rows(), 500);
        assert!(m.data.cols() >= 20 && m.data.cols() <= 35);
        assert_eq!(&m.columns[..2], &["inspected_ratio_g50", "ntl_ratio_g50"]);
        assert_eq!(m.columns[8], "daily_kwh_m11");
        assert_eq!(m.columns[19], "daily_kwh_m0");
        for j in m.continuous_columns() {
            let col = m.data.column(j);
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            assert!(mean.abs() < 1e-9, "column {} mean {mean}", m.columns[j]);
            assert!(var == 0.0 || (var - 1.0).abs() < 1e-9, "column {} var {var}", m.columns[j]);
        }
        for j in m.blocks.binary.clone() {
            assert!(m.data.column(j).iter().all(|&v| v == 0.0 || v == 1.0));
        }
        assert_eq!(m.columns_for(FeatureSet::TimeSeriesOnly).len(), 12);
    }

    #[test]
    fn single_grid_gives_two_neighborhood_columns() {
        let cfg = FeatureConfig {
            grid_sizes: alloc::vec![50],
            ..FeatureConfig::default()
        };
        let raw = extract_features(&sample(), &cfg).unwrap();
        assert_eq!(raw.neighborhood.width(), 2);
    }

    #[test]
    fn plan_transfers_across_samples() {
        let ds = generate_synthetic(&SyntheticConfig {
            num_customers: 3000,
            outlier_fraction: 0.0,
            ..SyntheticConfig::default()
        })
        .unwrap();
        let cfg = FeatureConfig::default();
        let a = extract_features(&sample_proportion(&ds, 0.1, 400, 1).unwrap(), &cfg).unwrap();
        let b = extract_features(&sample_proportion(&ds, 0.6, 400, 2).unwrap(), &cfg).unwrap();
        let plan = FeaturePlan::fit(&a, cfg.variance_p, None, 1).unwrap();
        let m = plan.apply(&b).unwrap();
        assert_eq!(m.columns, plan.columns);
        assert_eq!(m.data.rows(), 400);
    }

    #[test]
    fn fraud_drop_visible_in_consumption() {
        use crate::dataset::generate_synthetic_with_truth;
        let cfg = SyntheticConfig {
            num_customers: 4000,
            ..SyntheticConfig::default()
        };
        let (ds, truth) = generate_synthetic_with_truth(&cfg).unwrap();
        let by = ds.readings_by_customer();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let mut ratios = Vec::new();
        for (k, c) in ds.customers().iter().enumerate() {
            let Some(onset) = truth.fraud_onset[k] else { continue };
            let rs = &by[&c.id];
            // window over the whole history: slot d is month d, slot 0 has no predecessor
            let f = daily_average_consumption(rs, rs[rs.len() - 1].date, cfg.num_months);
            if onset >= 3 {
                ratios.push(mean(&f.values[onset..]) / mean(&f.values[1..onset]));
            }
        }
        assert!(ratios.len() > 50, "only {} usable fraud series", ratios.len());
        let avg = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!((avg - 0.2).abs() <= 0.2 * 0.05, "post/pre ratio {avg}");
    }
}
