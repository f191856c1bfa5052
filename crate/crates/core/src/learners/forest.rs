//! Random forest of unpruned Gini trees.
//!
//! Each tree sees a bootstrap sample of `n` rows and considers `⌈√d⌉`
//! randomly chosen features at every split. Tree `t` draws from stream `t` of
//! a ChaCha generator keyed by the training seed, so a forest is a pure
//! function of (data, seed, tree count) whatever the worker count.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::TrainConfig;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::parallel;
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go to `left`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        /// Share of positive training rows reaching this leaf.
        positive_fraction: f64,
        samples: usize,
    },
}

/// Nodes in an arena; index 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    fn leaf_for(&self, x: &[f64]) -> (f64, usize) {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
                Node::Leaf {
                    positive_fraction,
                    samples,
                } => return (positive_fraction, samples),
            }
        }
    }

    /// The tree's vote: its leaf's majority, ties negative.
    pub fn vote(&self, x: &[f64]) -> bool {
        self.leaf_for(x).0 > 0.5
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<DecisionTree>,
    pub n_features: usize,
    /// Features considered per split.
    pub max_features: usize,
    /// Bootstrap size as a fraction of the training rows.
    pub sample_fraction: f64,
    pub seed: u64,
}

struct Split {
    feature: usize,
    threshold: f64,
    /// Weighted child impurity, scaled by the node size.
    impurity: f64,
}

/// Best split of `rows` on `feature`, comparing `pos·neg/size` sums so that
/// minimizing it maximizes the Gini decrease.
fn best_split_on(x: &Matrix, y: &[bool], rows: &[usize], feature: usize, scratch: &mut Vec<(f64, bool)>) -> Option<Split> {
    scratch.clear();
    scratch.extend(rows.iter().map(|&r| (x.get(r, feature), y[r])));
    scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let n = scratch.len();
    let total_pos = scratch.iter().filter(|p| p.1).count();
    let mut best: Option<Split> = None;
    let mut left_pos = 0usize;
    for k in 1..n {
        left_pos += usize::from(scratch[k - 1].1);
        let (lo, hi) = (scratch[k - 1].0, scratch[k].0);
        if lo == hi {
            continue;
        }
        let nl = k as f64;
        let nr = (n - k) as f64;
        let lp = left_pos as f64;
        let rp = (total_pos - left_pos) as f64;
        let impurity = lp * (nl - lp) / nl + rp * (nr - rp) / nr;
        if best.as_ref().is_none_or(|b| impurity < b.impurity) {
            let mid = lo + (hi - lo) / 2.0;
            let threshold = if mid < hi { mid } else { lo };
            best = Some(Split {
                feature,
                threshold,
                impurity,
            });
        }
    }
    best
}

fn grow_tree(x: &Matrix, y: &[bool], max_features: usize, rng: &mut ChaCha8Rng) -> DecisionTree {
    let n = x.rows();
    let d = x.cols();
    let sample: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let mut nodes: Vec<Node> = vec![Node::Leaf {
        positive_fraction: 0.0,
        samples: 0,
    }];
    let mut stack = vec![(0usize, sample)];
    let mut scratch = Vec::with_capacity(n);
    while let Some((slot, rows)) = stack.pop() {
        let pos = rows.iter().filter(|&&r| y[r]).count();
        let leaf = Node::Leaf {
            positive_fraction: pos as f64 / rows.len() as f64,
            samples: rows.len(),
        };
        if pos == 0 || pos == rows.len() {
            nodes[slot] = leaf;
            continue;
        }
        let mut candidates: Vec<usize> = index::sample(rng, d, max_features.min(d)).into_vec();
        candidates.sort_unstable();
        let mut best: Option<Split> = None;
        let consider = |features: &[usize], best: &mut Option<Split>, scratch: &mut Vec<(f64, bool)>| {
            for &f in features {
                if let Some(s) = best_split_on(x, y, &rows, f, scratch) {
                    if best.as_ref().is_none_or(|b| s.impurity < b.impurity) {
                        *best = Some(s);
                    }
                }
            }
        };
        consider(&candidates, &mut best, &mut scratch);
        if best.is_none() {
            // every drawn feature is constant here; fall back to the rest
            let rest: Vec<usize> = (0..d).filter(|f| candidates.binary_search(f).is_err()).collect();
            consider(&rest, &mut best, &mut scratch);
        }
        let Some(split) = best else {
            nodes[slot] = leaf;
            continue;
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| x.get(r, split.feature) <= split.threshold);
        let left = nodes.len();
        let right = left + 1;
        nodes.push(leaf.clone());
        nodes.push(leaf);
        nodes[slot] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        stack.push((right, right_rows));
        stack.push((left, left_rows));
    }
    DecisionTree { nodes }
}

/// Trains `tree_count` trees in parallel over `config.workers`.
pub fn train_forest(x: &Matrix, y: &[bool], tree_count: usize, config: &TrainConfig) -> Result<ForestModel> {
    if tree_count == 0 {
        return Err(Error::Config("tree count must be at least 1".into()));
    }
    if x.rows() == 0 {
        return Err(Error::Degenerate("training set is empty".into()));
    }
    if x.rows() != y.len() {
        return Err(Error::Alignment(alloc::format!("{} rows but {} targets", x.rows(), y.len())));
    }
    let d = x.cols();
    let max_features = (libm::ceil(libm::sqrt(d as f64)) as usize).max(1);
    let trees = parallel::map_indexed(config.workers, tree_count, |t| {
        let mut rng = seed::rng_stream(config.seed, t as u64);
        grow_tree(x, y, max_features, &mut rng)
    });
    Ok(ForestModel {
        trees,
        n_features: d,
        max_features,
        sample_fraction: 1.0,
        seed: config.seed,
    })
}

/// Fraction of trees voting positive per row.
pub fn predict_forest(model: &ForestModel, x: &Matrix, workers: usize) -> Result<Vec<f64>> {
    x.ensure_cols(model.n_features)?;
    let t = model.trees.len() as f64;
    Ok(parallel::map_indexed(workers, x.rows(), |i| {
        let row = x.row(i);
        model.trees.iter().filter(|tree| tree.vote(row)).count() as f64 / t
    }))
}
