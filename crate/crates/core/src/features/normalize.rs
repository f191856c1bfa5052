use alloc::vec::Vec;

use crate::matrix::Matrix;

/// Population mean and standard deviation of one column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnScaler {
    pub mean: f64,
    pub std: f64,
}

impl ColumnScaler {
    pub fn fit(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { mean: 0.0, std: 0.0 };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self {
            mean,
            std: libm::sqrt(var),
        }
    }

    /// `(x - mean) / std`, or 0 for a constant column.
    pub fn apply(&self, x: f64) -> f64 {
        if self.std > 0.0 {
            (x - self.mean) / self.std
        } else {
            0.0
        }
    }
}

/// Z-scores one column.
pub fn normalize(column: &[f64]) -> (Vec<f64>, ColumnScaler) {
    let s = ColumnScaler::fit(column);
    (column.iter().map(|&x| s.apply(x)).collect(), s)
}

/// Per-column scalers; `None` columns pass through unchanged.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Normalizer {
    pub scalers: Vec<Option<ColumnScaler>>,
}

impl Normalizer {
    /// Fits scalers for `columns` of `m` (other columns pass through).
    pub fn fit(m: &Matrix, columns: &[usize], workers: usize) -> Self {
        let mut scalers = alloc::vec![None; m.cols()];
        let fitted = crate::parallel::map_indexed(workers, columns.len(), |k| {
            ColumnScaler::fit(&m.column(columns[k]))
        });
        for (&j, s) in columns.iter().zip(fitted) {
            scalers[j] = Some(s);
        }
        Self { scalers }
    }

    pub fn apply(&self, m: &mut Matrix) {
        for i in 0..m.rows() {
            for (x, s) in m.row_mut(i).iter_mut().zip(&self.scalers) {
                if let Some(s) = s {
                    *x = s.apply(*x);
                }
            }
        }
    }
}
