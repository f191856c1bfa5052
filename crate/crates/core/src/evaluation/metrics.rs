use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn from_predictions(predicted: &[bool], actual: &[bool]) -> Result<Self> {
        if predicted.len() != actual.len() {
            return Err(Error::Alignment(alloc::format!(
                "{} predictions for {} targets",
                predicted.len(),
                actual.len()
            )));
        }
        let mut c = Self::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// One operating point and the area under the ROC curve through it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub auc: f64,
    pub recall: f64,
    pub specificity: f64,
    pub counts: ConfusionCounts,
}

/// Area of the ROC polygon (0,0) → (1-specificity, recall) → (1,1), which is
/// `(recall + specificity) / 2`.
pub fn auc_single_point(counts: ConfusionCounts) -> Result<Metrics> {
    if counts.tp + counts.fn_ == 0 {
        return Err(Error::MetricUndefined("recall: no positive rows"));
    }
    if counts.tn + counts.fp == 0 {
        return Err(Error::MetricUndefined("specificity: no negative rows"));
    }
    let recall = counts.tp as f64 / (counts.tp + counts.fn_) as f64;
    let specificity = counts.tn as f64 / (counts.tn + counts.fp) as f64;
    Ok(Metrics {
        auc: (recall + specificity) / 2.0,
        recall,
        specificity,
        counts,
    })
}
