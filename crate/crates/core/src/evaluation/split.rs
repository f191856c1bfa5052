use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;

pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_TEST_FRACTION: f64 = 0.1;

/// Held-out test rows plus `folds` validation slices over the remaining pool.
/// Fold `f` trains on the pool minus `folds[f]` and validates on `folds[f]`.
/// All index lists are ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    pub test: Vec<usize>,
    pub pool: Vec<usize>,
    pub folds: Vec<Vec<usize>>,
    pub seed: u64,
}

impl SplitPlan {
    pub fn fold_validation(&self, fold: usize) -> &[usize] {
        &self.folds[fold]
    }

    pub fn fold_train(&self, fold: usize) -> Vec<usize> {
        let held = &self.folds[fold];
        self.pool.iter().copied().filter(|i| held.binary_search(i).is_err()).collect()
    }
}

/// Stratified split. Each class sends `max(1, round(test_fraction · n_c))`
/// shuffled rows to the test set and deals the rest round-robin over the
/// folds, so every fold sees both classes.
pub fn make_split(targets: &[bool], folds: usize, test_fraction: f64, seed: u64) -> Result<SplitPlan> {
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Config(format!("test fraction must be in (0, 1), got {test_fraction}")));
    }
    if targets.len() < 20 {
        return Err(Error::Split(format!("need at least 20 rows, got {}", targets.len())));
    }
    let mut rng = seed::rng(seed);
    let mut test = Vec::new();
    let mut pool = Vec::new();
    let mut fold_rows = alloc::vec![Vec::new(); folds];
    let mut dealt = 0usize;
    for class in [false, true] {
        let mut rows: Vec<usize> = (0..targets.len()).filter(|&i| targets[i] == class).collect();
        let n_test = (libm::round(test_fraction * rows.len() as f64) as usize).max(1);
        if rows.len() < n_test + folds {
            return Err(Error::Split(format!(
                "class {} has {} rows; a split needs at least {}",
                u8::from(class),
                rows.len(),
                n_test + folds
            )));
        }
        rows.shuffle(&mut rng);
        test.extend_from_slice(&rows[..n_test]);
        for &r in &rows[n_test..] {
            fold_rows[dealt % folds].push(r);
            dealt += 1;
        }
        pool.extend_from_slice(&rows[n_test..]);
    }
    test.sort_unstable();
    pool.sort_unstable();
    for f in &mut fold_rows {
        f.sort_unstable();
    }
    Ok(SplitPlan {
        test,
        pool,
        folds: fold_rows,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn balanced_hundred() {
        let y: Vec<bool> = (0..100).map(|i| i % 2 == 0).collect();
        let p = make_split(&y, 10, 0.1, 3).unwrap();
        assert_eq!(p.test.len(), 10);
        assert_eq!(p.test.iter().filter(|&&i| y[i]).count(), 5);
        assert_eq!(p, make_split(&y, 10, 0.1, 3).unwrap());
        assert_ne!(p.test, make_split(&y, 10, 0.1, 4).unwrap().test);
    }

    #[test]
    fn folds_partition_pool_and_sets_are_exhaustive() {
        let y: Vec<bool> = (0..237).map(|i| i % 7 == 0).collect();
        let p = make_split(&y, 10, 0.1, 9).unwrap();
        let mut all: Vec<usize> = p.folds.concat();
        all.sort_unstable();
        assert_eq!(all, p.pool);
        let mut every = [p.test.clone(), p.pool.clone()].concat();
        every.sort_unstable();
        assert_eq!(every, (0..237).collect::<Vec<_>>());
        for f in 0..10 {
            let v = p.fold_validation(f);
            assert!(v.iter().any(|&i| y[i]) && v.iter().any(|&i| !y[i]));
            assert_eq!(p.fold_train(f).len() + v.len(), p.pool.len());
        }
    }

    #[test]
    fn rare_class_rejected() {
        let mut y = vec![false; 100];
        y[..10].fill(true);
        assert!(matches!(make_split(&y, 10, 0.1, 0), Err(Error::Split(_))));
        y[10] = true;
        assert!(make_split(&y, 10, 0.1, 0).is_ok());
        assert!(make_split(&[true; 19], 10, 0.1, 0).is_err());
    }
}
