use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::index;

use super::{CustomerId, Dataset, InspectionResult};
use crate::error::{Error, Result};
use crate::seed;

/// Draws an inspection sample with exactly `round(target_ntl_fraction *
/// sample_size)` positive labels, without replacement within each class.
///
/// Only each customer's most recent inspection is eligible. The result keeps
/// every customer (those not drawn are uninspected within the sample, which
/// keeps the per-cell customer denominators intact) but only the readings of
/// the sampled customers. Sampled inspections are ordered by customer id.
pub fn sample_proportion(
    dataset: &Dataset,
    target_ntl_fraction: f64,
    sample_size: usize,
    seed: u64,
) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&target_ntl_fraction) {
        return Err(Error::Config(alloc::format!(
            "target NTL fraction must be in [0, 1], got {target_ntl_fraction}"
        )));
    }
    let latest = dataset.latest_inspections();
    let (positives, negatives): (Vec<&InspectionResult>, Vec<&InspectionResult>) =
        latest.values().copied().partition(|i| i.ntl_found);

    let want_pos = libm::round(target_ntl_fraction * sample_size as f64) as usize;
    let want_neg = sample_size - want_pos;
    if want_pos > positives.len() {
        return Err(Error::Sampling {
            label: "positive",
            needed: want_pos,
            available: positives.len(),
        });
    }
    if want_neg > negatives.len() {
        return Err(Error::Sampling {
            label: "negative",
            needed: want_neg,
            available: negatives.len(),
        });
    }

    let mut rng = seed::rng(seed);
    let mut chosen: Vec<InspectionResult> = index::sample(&mut rng, positives.len(), want_pos)
        .into_iter()
        .map(|i| positives[i].clone())
        .chain(
            index::sample(&mut rng, negatives.len(), want_neg)
                .into_iter()
                .map(|i| negatives[i].clone()),
        )
        .collect();
    chosen.sort_by_key(|i| i.customer);

    let sampled: BTreeSet<CustomerId> = chosen.iter().map(|i| i.customer).collect();
    let readings = dataset
        .readings()
        .iter()
        .filter(|r| sampled.contains(&r.customer))
        .cloned()
        .collect();
    Dataset::new(dataset.customers().to_vec(), readings, chosen)
}
