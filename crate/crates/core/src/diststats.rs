//! Mean, variance, skewness and excess kurtosis of the neighborhood-feature
//! distributions, split by inspection outcome.
//!
//! All four statistics are population moments: skewness is `m3 / m2^1.5` and
//! excess kurtosis `m4 / m2^2 - 3`, with `mk` the k-th central moment.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::features::RawFeatures;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    /// Population variance.
    pub variance: f64,
    /// `None` when the variance is zero.
    pub skewness: Option<f64>,
    /// Excess kurtosis; `None` when the variance is zero.
    pub kurtosis_excess: Option<f64>,
}

impl Moments {
    /// Bessel-corrected variance, `None` for a single value.
    pub fn sample_variance(&self) -> Option<f64> {
        (self.count > 1).then(|| self.variance * self.count as f64 / (self.count - 1) as f64)
    }
}

pub fn moments(values: &[f64]) -> Result<Moments> {
    if values.is_empty() {
        return Err(Error::Degenerate("moments of an empty sample".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let (skewness, kurtosis_excess) = if m2 > 0.0 {
        (Some(m3 / (m2 * libm::sqrt(m2))), Some(m4 / (m2 * m2) - 3.0))
    } else {
        (None, None)
    };
    Ok(Moments {
        count: values.len(),
        mean,
        variance: m2,
        skewness,
        kurtosis_excess,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NeighborhoodFeature {
    InspectedRatio,
    NtlRatio,
}

impl NeighborhoodFeature {
    pub fn token(self) -> &'static str {
        match self {
            NeighborhoodFeature::InspectedRatio => "inspected_ratio",
            NeighborhoodFeature::NtlRatio => "ntl_ratio",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMoments {
    pub feature: NeighborhoodFeature,
    pub grid_size: usize,
    pub ntl_proportion: f64,
    /// `true` for customers whose inspection found NTL.
    pub class: bool,
    /// `None` when the class is absent from the sample.
    pub moments: Option<Moments>,
}

/// One row per feature × grid size × class, over raw (unnormalized) ratios.
pub fn per_class_feature_moments(raw: &RawFeatures, ntl_proportion: f64) -> Vec<ClassMoments> {
    let mut out = Vec::new();
    for (g, grid) in raw.grids.iter().enumerate() {
        for (k, feature) in [NeighborhoodFeature::InspectedRatio, NeighborhoodFeature::NtlRatio]
            .into_iter()
            .enumerate()
        {
            let column = raw.neighborhood_column(2 * g + k);
            for class in [false, true] {
                let values: Vec<f64> = column
                    .iter()
                    .zip(&raw.targets)
                    .filter(|(_, t)| t.1 == class)
                    .map(|(v, _)| *v)
                    .collect();
                out.push(ClassMoments {
                    feature,
                    grid_size: grid.spec.cells_per_axis,
                    ntl_proportion,
                    class,
                    moments: moments(&values).ok(),
                });
            }
        }
    }
    out
}
