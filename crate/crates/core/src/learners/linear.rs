//! L2-regularized linear classifiers trained by minibatch (sub)gradient descent.
//!
//! Objective: `mean_i loss(y_i, w·x_i + b) + ||w||² / (2 C n)`, i.e. `C` times
//! the summed loss plus half the squared norm, rescaled by `1 / (C n)`. The
//! bias is not regularized.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::TrainConfig;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::parallel;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    CrossEntropy,
    Hinge,
}

impl LossKind {
    pub fn token(self) -> &'static str {
        match self {
            LossKind::CrossEntropy => "cross_entropy",
            LossKind::Hinge => "hinge",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        [LossKind::CrossEntropy, LossKind::Hinge].into_iter().find(|k| k.token() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub loss: LossKind,
    pub c: f64,
    /// Objective at the zero initialization.
    pub initial_loss: f64,
    pub final_loss: f64,
    pub epochs_run: usize,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `ln(1 + e^t)` without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + libm::log1p(libm::exp(-libm::fabs(t)))
}

fn signed(y: bool) -> f64 {
    if y {
        1.0
    } else {
        -1.0
    }
}

fn point_loss(kind: LossKind, z: f64, y: bool) -> f64 {
    match kind {
        LossKind::CrossEntropy => softplus(-signed(y) * z),
        LossKind::Hinge => (1.0 - signed(y) * z).max(0.0),
    }
}

/// d loss / d z
fn point_slope(kind: LossKind, z: f64, y: bool) -> f64 {
    match kind {
        LossKind::CrossEntropy => sigmoid(z) - f64::from(u8::from(y)),
        LossKind::Hinge => {
            if signed(y) * z < 1.0 {
                -signed(y)
            } else {
                0.0
            }
        }
    }
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

fn lambda(c: f64, n: usize) -> f64 {
    1.0 / (c * n as f64)
}

/// Regularized mean loss over all rows.
pub fn objective(kind: LossKind, w: &[f64], b: f64, x: &Matrix, y: &[bool], c: f64) -> f64 {
    let n = x.rows();
    let data: f64 = x
        .iter_rows()
        .zip(y)
        .map(|(row, &t)| point_loss(kind, dot(w, row) + b, t))
        .sum::<f64>()
        / n as f64;
    data + 0.5 * lambda(c, n) * dot(w, w)
}

/// Summed loss slopes over `rows` as (weight part, bias part).
fn slope_sums(kind: LossKind, w: &[f64], b: f64, x: &Matrix, y: &[bool], rows: &[usize]) -> (Vec<f64>, f64) {
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for &i in rows {
        let row = x.row(i);
        let s = point_slope(kind, dot(w, row) + b, y[i]);
        if s != 0.0 {
            for (g, v) in gw.iter_mut().zip(row) {
                *g += s * v;
            }
            gb += s;
        }
    }
    (gw, gb)
}

/// Exact gradient (subgradient for hinge) of [`objective`].
pub fn objective_gradient(kind: LossKind, w: &[f64], b: f64, x: &Matrix, y: &[bool], c: f64) -> (Vec<f64>, f64) {
    let n = x.rows();
    let rows: Vec<usize> = (0..n).collect();
    let (mut gw, gb) = slope_sums(kind, w, b, x, y, &rows);
    let lam = lambda(c, n);
    for (g, wi) in gw.iter_mut().zip(w) {
        *g = *g / n as f64 + lam * wi;
    }
    (gw, gb / n as f64)
}

fn check_inputs(x: &Matrix, y: &[bool], c: f64, config: &TrainConfig) -> Result<()> {
    config.validate()?;
    if !(c > 0.0) {
        return Err(Error::Config(alloc::format!("C must be positive, got {c}")));
    }
    if x.rows() == 0 {
        return Err(Error::Degenerate("training set is empty".into()));
    }
    if x.rows() != y.len() {
        return Err(Error::Alignment(alloc::format!(
            "{} rows but {} targets",
            x.rows(),
            y.len()
        )));
    }
    Ok(())
}

fn train_linear(kind: LossKind, x: &Matrix, y: &[bool], c: f64, config: &TrainConfig) -> Result<LinearModel> {
    check_inputs(x, y, c, config)?;
    let n = x.rows();
    let d = x.cols();
    let lam = lambda(c, n);
    let workers = config.workers;
    parallel::with_pool(workers, || {
        let mut rng = seed::rng(config.seed);
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let initial_loss = objective(kind, &w, b, x, y, c);
        let mut prev = initial_loss;
        let mut order: Vec<usize> = (0..n).collect();
        let mut epochs_run = 0;
        for epoch in 0..config.epochs {
            let step = config.learning_rate / libm::sqrt((epoch + 1) as f64);
            order.shuffle(&mut rng);
            for batch in order.chunks(config.batch_size) {
                let (gw, gb) = if workers > 1 {
                    let bounds = parallel::chunk_bounds(batch.len(), workers);
                    let parts = parallel::map_indexed(workers, bounds.len(), |p| {
                        let (lo, hi) = bounds[p];
                        slope_sums(kind, &w, b, x, y, &batch[lo..hi])
                    });
                    parts.into_iter().fold((vec![0.0; d], 0.0), |(mut aw, ab), (pw, pb)| {
                        for (a, p) in aw.iter_mut().zip(pw) {
                            *a += p;
                        }
                        (aw, ab + pb)
                    })
                } else {
                    slope_sums(kind, &w, b, x, y, batch)
                };
                let m = batch.len() as f64;
                for (wi, g) in w.iter_mut().zip(&gw) {
                    *wi -= step * (g / m + lam * *wi);
                }
                b -= step * gb / m;
            }
            epochs_run = epoch + 1;
            let loss = objective(kind, &w, b, x, y, c);
            if !loss.is_finite() || w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
                return Err(Error::Divergence { epoch, loss });
            }
            let done = libm::fabs(prev - loss) < config.tolerance;
            prev = loss;
            if done {
                break;
            }
        }
        Ok(LinearModel {
            weights: w,
            bias: b,
            loss: kind,
            c,
            initial_loss,
            final_loss: prev,
            epochs_run,
        })
    })
}

/// Logistic regression on cross-entropy. Deterministic for a fixed seed and
/// worker count.
pub fn train_logistic(x: &Matrix, y: &[bool], c: f64, config: &TrainConfig) -> Result<LinearModel> {
    train_linear(LossKind::CrossEntropy, x, y, c, config)
}

/// Linear SVM on hinge loss with labels mapped to ±1.
pub fn train_svm_linear(x: &Matrix, y: &[bool], c: f64, config: &TrainConfig) -> Result<LinearModel> {
    train_linear(LossKind::Hinge, x, y, c, config)
}

fn linear_scores(model: &LinearModel, x: &Matrix) -> Result<Vec<f64>> {
    x.ensure_cols(model.weights.len())?;
    Ok(x.iter_rows().map(|r| dot(&model.weights, r) + model.bias).collect())
}

/// `σ(w·x + b)` per row.
pub fn predict_logistic(model: &LinearModel, x: &Matrix) -> Result<Vec<f64>> {
    Ok(linear_scores(model, x)?.into_iter().map(sigmoid).collect())
}

/// Raw margins `w·x + b`.
pub fn svm_margins(model: &LinearModel, x: &Matrix) -> Result<Vec<f64>> {
    linear_scores(model, x)
}
