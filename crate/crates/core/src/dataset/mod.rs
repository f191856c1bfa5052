//! Customer, meter-reading and inspection records.

mod sampling;
mod synthetic;

pub use sampling::sample_proportion;
pub use synthetic::{generate_synthetic, generate_synthetic_with_truth, GroundTruth, SyntheticConfig};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CustomerId(pub u64);

impl fmt::Display for CustomerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Declares a categorical master-data field with its CSV tokens.
macro_rules! category {
    ($(#[$meta:meta])* $name:ident, $field:literal, { $($variant:ident => $token:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
            pub const FIELD: &'static str = $field;

            pub fn token(self) -> &'static str {
                match self {
                    $($name::$variant => $token),+
                }
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($token => Ok($name::$variant),)+
                    _ => Err(Error::Encoding {
                        field: $field,
                        token: s.into(),
                    }),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.token())
            }
        }
    };
}

category!(
    /// Customer class. The first seven are the enumerated tariff classes;
    /// `Other` is only accepted when the eight-class vocabulary is enabled.
    CustomerClass, "class", {
        Residential => "residential",
        Commercial => "commercial",
        Industrial => "industrial",
        PublicIllumination => "public_illumination",
        Rural => "rural",
        PublicService => "public_service",
        PowerGenerationInfrastructure => "power_generation_infrastructure",
        Other => "other",
    }
);

category!(ContractStatus, "contract_status", {
    Active => "active",
    Suspended => "suspended",
    Inactive => "inactive",
});

category!(Wires, "num_wires", {
    One => "1",
    Two => "2",
    Three => "3",
});

category!(Voltage, "voltage", {
    Above2_3Kv => "above_2_3kv",
    AtMost2_3Kv => "at_most_2_3kv",
});

#[derive(Debug, Clone, PartialEq)]
pub struct CustomerRecord {
    pub id: CustomerId,
    pub longitude: f64,
    pub latitude: f64,
    pub class: CustomerClass,
    pub contract_status: ContractStatus,
    pub wires: Wires,
    pub voltage: Voltage,
}

/// Consumption in kWh since the customer's previous reading.
#[derive(Debug, Clone, PartialEq)]
pub struct MeterReading {
    pub customer: CustomerId,
    pub date: NaiveDate,
    pub consumption_kwh: f64,
}

impl MeterReading {
    /// Month ordinal used to index consumption features.
    pub fn month_index(&self) -> i32 {
        month_ordinal(self.date)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InspectionResult {
    pub customer: CustomerId,
    pub date: NaiveDate,
    pub ntl_found: bool,
}

/// Months since year 0, so consecutive calendar months differ by one.
pub fn month_ordinal(date: NaiveDate) -> i32 {
    date.year() * 12 + date.month0() as i32
}

/// Customers, readings and inspections with verified referential integrity.
///
/// Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    customers: Vec<CustomerRecord>,
    readings: Vec<MeterReading>,
    inspections: Vec<InspectionResult>,
}

impl Dataset {
    /// Validates and wraps the three record collections.
    ///
    /// Checks unique customer ids, that every reading and inspection refers to
    /// a known customer, finite non-negative consumption, finite coordinates,
    /// and per-customer readings strictly increasing in date with at most one
    /// per calendar month.
    pub fn new(
        customers: Vec<CustomerRecord>,
        readings: Vec<MeterReading>,
        inspections: Vec<InspectionResult>,
    ) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for c in &customers {
            if !ids.insert(c.id) {
                return Err(Error::Integrity(format!("duplicate customer_id {}", c.id)));
            }
            if !c.longitude.is_finite() || !c.latitude.is_finite() {
                return Err(Error::Integrity(format!(
                    "customer {} has non-finite coordinates",
                    c.id
                )));
            }
        }

        let mut last: BTreeMap<CustomerId, NaiveDate> = BTreeMap::new();
        for r in &readings {
            if !ids.contains(&r.customer) {
                return Err(Error::Integrity(format!(
                    "reading references unknown customer_id {}",
                    r.customer
                )));
            }
            if !(r.consumption_kwh >= 0.0) || !r.consumption_kwh.is_finite() {
                return Err(Error::Integrity(format!(
                    "reading for customer {} on {} has invalid consumption {}",
                    r.customer, r.date, r.consumption_kwh
                )));
            }
            if let Some(prev) = last.insert(r.customer, r.date) {
                if r.date <= prev || month_ordinal(r.date) == month_ordinal(prev) {
                    return Err(Error::Integrity(format!(
                        "readings for customer {} not strictly monthly: {} after {}",
                        r.customer, r.date, prev
                    )));
                }
            }
        }

        for i in &inspections {
            if !ids.contains(&i.customer) {
                return Err(Error::Integrity(format!(
                    "inspection references unknown customer_id {}",
                    i.customer
                )));
            }
        }

        Ok(Self {
            customers,
            readings,
            inspections,
        })
    }

    pub fn customers(&self) -> &[CustomerRecord] {
        &self.customers
    }

    pub fn readings(&self) -> &[MeterReading] {
        &self.readings
    }

    pub fn inspections(&self) -> &[InspectionResult] {
        &self.inspections
    }

    pub fn into_parts(self) -> (Vec<CustomerRecord>, Vec<MeterReading>, Vec<InspectionResult>) {
        (self.customers, self.readings, self.inspections)
    }

    /// Readings grouped per customer, in date order.
    pub fn readings_by_customer(&self) -> BTreeMap<CustomerId, Vec<&MeterReading>> {
        let mut out: BTreeMap<CustomerId, Vec<&MeterReading>> = BTreeMap::new();
        for r in &self.readings {
            out.entry(r.customer).or_default().push(r);
        }
        out
    }

    /// Most recent inspection per customer. Same-date duplicates resolve to
    /// the one listed last.
    pub fn latest_inspections(&self) -> BTreeMap<CustomerId, &InspectionResult> {
        let mut out: BTreeMap<CustomerId, &InspectionResult> = BTreeMap::new();
        for i in &self.inspections {
            match out.get(&i.customer) {
                Some(prev) if prev.date > i.date => {}
                _ => {
                    out.insert(i.customer, i);
                }
            }
        }
        out
    }

    /// Fraction of customers (by latest inspection) with NTL found, or `None`
    /// when nobody is inspected.
    pub fn ntl_rate(&self) -> Option<f64> {
        let latest = self.latest_inspections();
        if latest.is_empty() {
            return None;
        }
        let pos = latest.values().filter(|i| i.ntl_found).count();
        Some(pos as f64 / latest.len() as f64)
    }

    /// Drops the given customers together with their readings and inspections.
    pub fn without_customers(&self, removed: &BTreeSet<CustomerId>) -> Self {
        Self {
            customers: self
                .customers
                .iter()
                .filter(|c| !removed.contains(&c.id))
                .cloned()
                .collect(),
            readings: self
                .readings
                .iter()
                .filter(|r| !removed.contains(&r.customer))
                .cloned()
                .collect(),
            inspections: self
                .inspections
                .iter()
                .filter(|i| !removed.contains(&i.customer))
                .cloned()
                .collect(),
        }
    }
}
