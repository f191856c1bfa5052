//! Seeded synthetic data with planted geographic fraud clusters.
//!
//! Customers are drawn from Gaussian clusters inside a 2° × 5° box (the 5:2
//! latitude-to-longitude aspect of the reference service area), plus a
//! uniform background and a few far-away coordinate outliers. Each cluster
//! carries its own fraud probability, shifted on the logit scale by the
//! customer's class and contract status. Fraudulent customers' daily
//! consumption is multiplied by `drop_factor` from a random onset month; a
//! share of honest customers also shows a legitimate drop so the time series
//! alone is an imperfect signal. Every customer receives exactly one
//! inspection whose label equals its fraud flag.

use alloc::vec::Vec;

use chrono::{Datelike, Months, NaiveDate};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use super::{
    ContractStatus, CustomerClass, CustomerId, CustomerRecord, Dataset, InspectionResult,
    MeterReading, Voltage, Wires,
};
use crate::error::{Error, Result};
use crate::seed;

pub const BOX_MIN_LONGITUDE: f64 = -49.0;
pub const BOX_MAX_LONGITUDE: f64 = -47.0;
pub const BOX_MIN_LATITUDE: f64 = -25.0;
pub const BOX_MAX_LATITUDE: f64 = -20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub num_customers: usize,
    pub num_months: usize,
    pub cluster_count: usize,
    /// Each cluster's fraud probability is uniform in this closed range.
    pub cluster_fraud_low: f64,
    pub cluster_fraud_high: f64,
    /// Share of customers placed uniformly over the box instead of in a cluster.
    pub background_fraction: f64,
    pub background_fraud_probability: f64,
    /// Scale of the class / contract-status logit shifts (0 disables them).
    pub master_data_effect: f64,
    pub drop_factor: f64,
    pub legit_drop_probability: f64,
    /// Share of customers with invalid coordinates far outside the box.
    pub outlier_fraction: f64,
    pub include_other_class: bool,
    pub start_year: i32,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            num_customers: 20_000,
            num_months: 24,
            cluster_count: 40,
            cluster_fraud_low: 0.02,
            cluster_fraud_high: 0.7,
            background_fraction: 0.1,
            background_fraud_probability: 0.1,
            master_data_effect: 1.0,
            drop_factor: 0.2,
            legit_drop_probability: 0.15,
            outlier_fraction: 0.001,
            include_other_class: false,
            start_year: 2011,
            seed: 42,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(alloc::format!("{name} must be in [0, 1], got {v}")))
            }
        };
        prob("cluster_fraud_low", self.cluster_fraud_low)?;
        prob("cluster_fraud_high", self.cluster_fraud_high)?;
        prob("background_fraction", self.background_fraction)?;
        prob("background_fraud_probability", self.background_fraud_probability)?;
        prob("legit_drop_probability", self.legit_drop_probability)?;
        prob("outlier_fraction", self.outlier_fraction)?;
        if self.cluster_fraud_low > self.cluster_fraud_high {
            return Err(Error::Config("cluster_fraud_low exceeds cluster_fraud_high".into()));
        }
        if !(self.drop_factor > 0.0 && self.drop_factor <= 1.0) {
            return Err(Error::Config(alloc::format!(
                "drop_factor must be in (0, 1], got {}",
                self.drop_factor
            )));
        }
        if self.cluster_count == 0 && self.num_customers > 0 && self.background_fraction < 1.0 {
            return Err(Error::Config("cluster_count must be at least 1".into()));
        }
        if self.num_months < 2 {
            return Err(Error::Config("num_months must be at least 2".into()));
        }
        if !self.master_data_effect.is_finite() {
            return Err(Error::Config("master_data_effect must be finite".into()));
        }
        Ok(())
    }
}

/// Planted facts behind a generated dataset, indexed like `Dataset::customers`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub fraud: Vec<bool>,
    /// Month index (0-based, relative to the first reading) where consumption drops.
    pub fraud_onset: Vec<Option<usize>>,
    /// Cluster membership; `None` for background customers and outliers.
    pub cluster: Vec<Option<usize>>,
    pub cluster_fraud_probability: Vec<f64>,
    pub outlier: Vec<bool>,
}

pub fn generate_synthetic(config: &SyntheticConfig) -> Result<Dataset> {
    generate_synthetic_with_truth(config).map(|(ds, _)| ds)
}

struct Cluster {
    longitude: f64,
    latitude: f64,
    sd_longitude: f64,
    sd_latitude: f64,
    fraud_probability: f64,
}

fn class_shift(class: CustomerClass) -> f64 {
    match class {
        CustomerClass::Residential => 0.0,
        CustomerClass::Commercial => -0.4,
        CustomerClass::Industrial => -0.9,
        CustomerClass::PublicIllumination => -1.2,
        CustomerClass::Rural => 0.8,
        CustomerClass::PublicService => -1.0,
        CustomerClass::PowerGenerationInfrastructure => -1.2,
        CustomerClass::Other => 0.0,
    }
}

fn contract_shift(status: ContractStatus) -> f64 {
    match status {
        ContractStatus::Active => 0.0,
        ContractStatus::Suspended => 1.0,
        ContractStatus::Inactive => 0.5,
    }
}

/// Median daily consumption in kWh.
fn class_daily_median(class: CustomerClass) -> f64 {
    match class {
        CustomerClass::Residential => 5.0,
        CustomerClass::Commercial => 20.0,
        CustomerClass::Industrial => 80.0,
        CustomerClass::PublicIllumination => 15.0,
        CustomerClass::Rural => 6.0,
        CustomerClass::PublicService => 25.0,
        CustomerClass::PowerGenerationInfrastructure => 50.0,
        CustomerClass::Other => 10.0,
    }
}

fn shifted_probability(p: f64, shift: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 || shift == 0.0 {
        return p;
    }
    let logit = libm::log(p / (1.0 - p)) + shift;
    1.0 / (1.0 + libm::exp(-logit))
}

fn weighted<T: Copy>(rng: &mut ChaCha8Rng, table: &[(T, f64)]) -> T {
    let total: f64 = table.iter().map(|(_, w)| w).sum();
    let mut u = rng.random::<f64>() * total;
    for &(v, w) in table {
        if u < w {
            return v;
        }
        u -= w;
    }
    table[table.len() - 1].0
}

fn draw_master_data(
    rng: &mut ChaCha8Rng,
    include_other: bool,
) -> (CustomerClass, ContractStatus, Wires, Voltage) {
    use CustomerClass::*;
    let mut classes: Vec<(CustomerClass, f64)> = alloc::vec![
        (Residential, 0.58),
        (Commercial, 0.15),
        (Industrial, 0.04),
        (PublicIllumination, 0.02),
        (Rural, 0.14),
        (PublicService, 0.04),
        (PowerGenerationInfrastructure, 0.01),
    ];
    if include_other {
        classes.push((Other, 0.02));
    }
    let class = weighted(rng, &classes);
    let status = weighted(
        rng,
        &[
            (ContractStatus::Active, 0.8),
            (ContractStatus::Suspended, 0.12),
            (ContractStatus::Inactive, 0.08),
        ],
    );
    let wires = match class {
        Industrial | PowerGenerationInfrastructure => {
            weighted(rng, &[(Wires::One, 0.05), (Wires::Two, 0.15), (Wires::Three, 0.8)])
        }
        _ => weighted(rng, &[(Wires::One, 0.45), (Wires::Two, 0.35), (Wires::Three, 0.2)]),
    };
    let voltage = match class {
        Industrial | PowerGenerationInfrastructure => {
            weighted(rng, &[(Voltage::Above2_3Kv, 0.7), (Voltage::AtMost2_3Kv, 0.3)])
        }
        _ => weighted(rng, &[(Voltage::Above2_3Kv, 0.03), (Voltage::AtMost2_3Kv, 0.97)]),
    };
    (class, status, wires, voltage)
}

fn inside_box(lon: f64, lat: f64) -> bool {
    (BOX_MIN_LONGITUDE..=BOX_MAX_LONGITUDE).contains(&lon)
        && (BOX_MIN_LATITUDE..=BOX_MAX_LATITUDE).contains(&lat)
}

pub fn generate_synthetic_with_truth(config: &SyntheticConfig) -> Result<(Dataset, GroundTruth)> {
    config.validate()?;
    let mut rng = seed::rng(config.seed);
    let lon_span = BOX_MAX_LONGITUDE - BOX_MIN_LONGITUDE;
    let lat_span = BOX_MAX_LATITUDE - BOX_MIN_LATITUDE;

    let clusters: Vec<Cluster> = (0..config.cluster_count)
        .map(|_| Cluster {
            longitude: BOX_MIN_LONGITUDE + lon_span * rng.random_range(0.05..=0.95),
            latitude: BOX_MIN_LATITUDE + lat_span * rng.random_range(0.05..=0.95),
            sd_longitude: lon_span * rng.random_range(0.01..=0.04),
            sd_latitude: lat_span * rng.random_range(0.01..=0.04),
            fraud_probability: rng.random_range(config.cluster_fraud_low..=config.cluster_fraud_high),
        })
        .collect();

    let n = config.num_customers;
    let start = NaiveDate::from_ymd_opt(config.start_year, 1, 1)
        .ok_or_else(|| Error::Config(alloc::format!("invalid start_year {}", config.start_year)))?;
    let months = config.num_months;
    let noise = Normal::new(0.0, 1.0).expect("unit normal");

    let mut customers = Vec::with_capacity(n);
    let mut readings = Vec::with_capacity(n * months);
    let mut inspections = Vec::with_capacity(n);
    let mut truth = GroundTruth {
        fraud: Vec::with_capacity(n),
        fraud_onset: Vec::with_capacity(n),
        cluster: Vec::with_capacity(n),
        cluster_fraud_probability: clusters.iter().map(|c| c.fraud_probability).collect(),
        outlier: Vec::with_capacity(n),
    };

    for idx in 0..n {
        let id = CustomerId(idx as u64 + 1);
        let is_outlier = rng.random::<f64>() < config.outlier_fraction;
        let background = clusters.is_empty() || rng.random::<f64>() < config.background_fraction;
        let (lon, lat, cluster, base_p) = if is_outlier {
            // open ocean, far east of the service area
            (
                rng.random_range(-30.0..=-20.0),
                rng.random_range(BOX_MIN_LATITUDE..=BOX_MAX_LATITUDE),
                None,
                config.background_fraud_probability,
            )
        } else if background {
            (
                rng.random_range(BOX_MIN_LONGITUDE..=BOX_MAX_LONGITUDE),
                rng.random_range(BOX_MIN_LATITUDE..=BOX_MAX_LATITUDE),
                None,
                config.background_fraud_probability,
            )
        } else {
            let k = rng.random_range(0..clusters.len());
            let c = &clusters[k];
            let mut point = (c.longitude, c.latitude);
            for _ in 0..32 {
                let lon = c.longitude + c.sd_longitude * noise.sample(&mut rng);
                let lat = c.latitude + c.sd_latitude * noise.sample(&mut rng);
                if inside_box(lon, lat) {
                    point = (lon, lat);
                    break;
                }
            }
            (point.0, point.1, Some(k), c.fraud_probability)
        };

        let (class, status, wires, voltage) = draw_master_data(&mut rng, config.include_other_class);
        let shift = config.master_data_effect * (class_shift(class) + contract_shift(status));
        let fraud = rng.random::<f64>() < shifted_probability(base_p, shift);

        customers.push(CustomerRecord {
            id,
            longitude: lon,
            latitude: lat,
            class,
            contract_status: status,
            wires,
            voltage,
        });

        // Inspection in one of the last six months; drops start no later than it.
        let last = months - 1;
        let inspection_month = rng.random_range(last.saturating_sub(5)..=last);
        let onset = fraud.then(|| rng.random_range(0..=inspection_month));
        let legit = (!fraud && rng.random::<f64>() < config.legit_drop_probability).then(|| {
            (
                rng.random_range(0..=inspection_month),
                rng.random_range(0.3..=0.7),
            )
        });

        let median = class_daily_median(class);
        let base = LogNormal::new(libm::log(median), 0.6)
            .expect("finite lognormal")
            .sample(&mut rng);

        let mut prev = start - chrono::Days::new(rng.random_range(20..=40));
        for d in 0..months {
            let month_start = start + Months::new(d as u32);
            let day: u32 = *[1u32, 5, 10, 15, 20, 25, 28]
                .choose(&mut rng)
                .expect("non-empty");
            let date = month_start
                .with_day(day)
                .expect("day 1..=28 exists in every month");
            let days = (date - prev).num_days() as f64;
            let mut rate = base * rng.random_range(0.85..=1.15);
            if onset.is_some_and(|o| d >= o) {
                rate *= config.drop_factor;
            }
            if let Some((o, factor)) = legit {
                if d >= o {
                    rate *= factor;
                }
            }
            readings.push(MeterReading {
                customer: id,
                date,
                consumption_kwh: rate * days,
            });
            if d == inspection_month {
                let inspection_day = rng.random_range(1..=28);
                inspections.push(InspectionResult {
                    customer: id,
                    date: month_start.with_day(inspection_day).expect("valid day"),
                    ntl_found: fraud,
                });
            }
            prev = date;
        }

        truth.fraud.push(fraud);
        truth.fraud_onset.push(onset);
        truth.cluster.push(cluster);
        truth.outlier.push(is_outlier);
    }

    Ok((Dataset::new(customers, readings, inspections)?, truth))
}
