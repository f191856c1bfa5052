//! Exact k-nearest-neighbors. Nothing is learned; every query scans all
//! stored rows.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Distance {
    #[default]
    Euclidean,
    Manhattan,
    /// `1 - cos(a, b)`; a zero vector has similarity 0 with everything.
    Cosine,
}

impl Distance {
    pub const ALL: [Distance; 3] = [Distance::Euclidean, Distance::Manhattan, Distance::Cosine];

    pub fn token(self) -> &'static str {
        match self {
            Distance::Euclidean => "euclidean",
            Distance::Manhattan => "manhattan",
            Distance::Cosine => "cosine",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.token() == s)
    }

    pub fn between(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Distance::Euclidean => libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()),
            Distance::Manhattan => a.iter().zip(b).map(|(x, y)| libm::fabs(x - y)).sum(),
            Distance::Cosine => {
                let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
                for (x, y) in a.iter().zip(b) {
                    ab += x * y;
                    aa += x * x;
                    bb += y * y;
                }
                if aa == 0.0 || bb == 0.0 {
                    1.0
                } else {
                    1.0 - ab / (libm::sqrt(aa) * libm::sqrt(bb))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub data: Matrix,
    pub labels: Vec<bool>,
    pub k: usize,
    pub distance: Distance,
}

pub fn train_knn(x: &Matrix, y: &[bool], k: usize, distance: Distance) -> Result<KnnModel> {
    if k == 0 || k > x.rows() {
        return Err(Error::Config(alloc::format!(
            "k must be in 1..={} (training rows), got {k}",
            x.rows()
        )));
    }
    if x.rows() != y.len() {
        return Err(Error::Alignment(alloc::format!("{} rows but {} targets", x.rows(), y.len())));
    }
    Ok(KnnModel {
        data: x.clone(),
        labels: y.to_vec(),
        k,
        distance,
    })
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Indices of the `k` stored rows closest to `query`, nearest first; equal
/// distances resolve to the lower row index.
pub fn neighbors(model: &KnnModel, query: &[f64]) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = model
        .data
        .iter_rows()
        .enumerate()
        .map(|(i, r)| (model.distance.between(query, r), i))
        .collect();
    let k = model.k.min(d.len());
    if k == 0 {
        return Vec::new();
    }
    if k < d.len() {
        d.select_nth_unstable_by(k - 1, by_distance_then_index);
        d.truncate(k);
    }
    d.sort_unstable_by(by_distance_then_index);
    d.into_iter().map(|(_, i)| i).collect()
}

/// Fraction of positive labels among each row's `k` nearest neighbors.
/// Queries run in parallel; results do not depend on the worker count.
pub fn predict_knn(model: &KnnModel, x: &Matrix, workers: usize) -> Result<Vec<f64>> {
    x.ensure_cols(model.data.cols())?;
    Ok(parallel::map_indexed(workers, x.rows(), |i| {
        let nn = neighbors(model, x.row(i));
        nn.iter().filter(|&&j| model.labels[j]).count() as f64 / model.k as f64
    }))
}
