use alloc::vec;
use alloc::vec::Vec;
use core::borrow::Borrow;

use chrono::NaiveDate;

use crate::dataset::{month_ordinal, MeterReading};

pub const DEFAULT_MONTHS: usize = 12;

/// Daily average consumption over the months ending at the anchor month.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsumptionFeatures {
    /// kWh/day, oldest month first.
    pub values: Vec<f64>,
    /// Months in the window without a usable pair of consecutive readings.
    pub missing_months: usize,
    /// Set when two consecutive readings share a date.
    pub flagged: bool,
}

/// Consumption of each month's reading divided by the days since the
/// preceding reading.
///
/// `readings` must be one customer's readings in date order. A month without
/// a reading, or whose reading has no predecessor, yields 0 and counts as
/// missing. A zero-day interval yields 0 and flags the customer.
pub fn daily_average_consumption<R: Borrow<MeterReading>>(
    readings: &[R],
    anchor: NaiveDate,
    months: usize,
) -> ConsumptionFeatures {
    let mut values = vec![0.0; months];
    let mut present = vec![false; months];
    let mut flagged = false;
    let last = month_ordinal(anchor);
    let first = last - months as i32 + 1;
    for (k, r) in readings.iter().enumerate() {
        let r = r.borrow();
        let m = r.month_index();
        if m < first || m > last || k == 0 {
            continue;
        }
        let slot = (m - first) as usize;
        let prev = readings[k - 1].borrow();
        let days = (r.date - prev.date).num_days();
        present[slot] = true;
        if days <= 0 {
            flagged = true;
            values[slot] = 0.0;
        } else {
            values[slot] = r.consumption_kwh / days as f64;
        }
    }
    ConsumptionFeatures {
        values,
        missing_months: present.iter().filter(|p| !**p).count(),
        flagged,
    }
}
