//! Dataset CSV files.
//!
//! A dataset directory holds three files:
//!
//! ```text
//! customers.csv    customer_id,longitude,latitude,class,contract_status,num_wires,voltage
//! readings.csv     customer_id,reading_date,consumption_kwh
//! inspections.csv  customer_id,inspection_date,ntl_found
//! ```
//!
//! Dates are `YYYY-MM-DD`, `ntl_found` is `1`/`0` (`true`/`false` are also
//! read). Floats are written in shortest round-trip form, so a write/read
//! cycle reproduces the dataset exactly.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use gridntl_core::dataset::{
    ContractStatus, CustomerClass, CustomerId, CustomerRecord, Dataset, InspectionResult, MeterReading, Voltage, Wires,
};

use crate::error::{AppError, AppResult, Context};

pub const CUSTOMERS_FILE: &str = "customers.csv";
pub const READINGS_FILE: &str = "readings.csv";
pub const INSPECTIONS_FILE: &str = "inspections.csv";

const CUSTOMER_HEADER: [&str; 7] = [
    "customer_id",
    "longitude",
    "latitude",
    "class",
    "contract_status",
    "num_wires",
    "voltage",
];
const READING_HEADER: [&str; 3] = ["customer_id", "reading_date", "consumption_kwh"];
const INSPECTION_HEADER: [&str; 3] = ["customer_id", "inspection_date", "ntl_found"];

pub fn create_dir(dir: &Path) -> AppResult<()> {
    fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))
}

pub fn create_file(path: &Path) -> AppResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| AppError::io(path, e))
}

/// Writes `text` to `path` in one go.
pub fn write_text(path: &Path, text: &str) -> AppResult<()> {
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

/// Rows of a CSV file after checking its header; each row comes with its
/// 1-based line number.
fn read_rows(path: &Path, header: &[&str]) -> AppResult<Vec<(u64, csv::StringRecord)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let found = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(AppError::parse(
            path,
            1,
            format!("expected header `{}`, found `{}`", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(AppError::parse(path, line, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        rows.push((line, rec));
    }
    Ok(rows)
}

fn csv_error(path: &Path, e: csv::Error) -> AppError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => AppError::io(path, io),
        other => AppError::parse(path, line, format!("{other:?}")),
    }
}

struct Fields<'a> {
    path: &'a Path,
    line: u64,
    rec: &'a csv::StringRecord,
    header: &'a [&'a str],
}

impl Fields<'_> {
    fn get<T: FromStr>(&self, i: usize) -> AppResult<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = &self.rec[i];
        raw.parse()
            .map_err(|e| AppError::parse(self.path, self.line, format!("{}: `{raw}`: {e}", self.header[i])))
    }

    fn date(&self, i: usize) -> AppResult<NaiveDate> {
        let raw = &self.rec[i];
        NaiveDate::parse_from_str(raw, "%Y-%m-%d")
            .map_err(|e| AppError::parse(self.path, self.line, format!("{}: `{raw}`: {e}", self.header[i])))
    }

    fn flag(&self, i: usize) -> AppResult<bool> {
        match &self.rec[i] {
            "1" | "true" => Ok(true),
            "0" | "false" => Ok(false),
            raw => Err(AppError::parse(
                self.path,
                self.line,
                format!("{}: `{raw}` is not 0/1", self.header[i]),
            )),
        }
    }
}

pub fn read_dataset(dir: &Path) -> AppResult<Dataset> {
    let path = dir.join(CUSTOMERS_FILE);
    let mut customers = Vec::new();
    for (line, rec) in read_rows(&path, &CUSTOMER_HEADER)? {
        let f = Fields { path: &path, line, rec: &rec, header: &CUSTOMER_HEADER };
        customers.push(CustomerRecord {
            id: CustomerId(f.get(0)?),
            longitude: f.get(1)?,
            latitude: f.get(2)?,
            class: f.get::<CustomerClass>(3)?,
            contract_status: f.get::<ContractStatus>(4)?,
            wires: f.get::<Wires>(5)?,
            voltage: f.get::<Voltage>(6)?,
        });
    }
    let path = dir.join(READINGS_FILE);
    let mut readings = Vec::new();
    for (line, rec) in read_rows(&path, &READING_HEADER)? {
        let f = Fields { path: &path, line, rec: &rec, header: &READING_HEADER };
        readings.push(MeterReading {
            customer: CustomerId(f.get(0)?),
            date: f.date(1)?,
            consumption_kwh: f.get(2)?,
        });
    }
    let path = dir.join(INSPECTIONS_FILE);
    let mut inspections = Vec::new();
    for (line, rec) in read_rows(&path, &INSPECTION_HEADER)? {
        let f = Fields { path: &path, line, rec: &rec, header: &INSPECTION_HEADER };
        inspections.push(InspectionResult {
            customer: CustomerId(f.get(0)?),
            date: f.date(1)?,
            ntl_found: f.flag(2)?,
        });
    }
    Dataset::new(customers, readings, inspections).context(|| format!("dataset in {}", dir.display()))
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> AppError + '_ {
    move |e| AppError::io(path, e)
}

fn finish(path: &Path, mut w: BufWriter<File>) -> AppResult<()> {
    w.flush().map_err(|e| AppError::io(path, e))
}

pub fn write_dataset(dir: &Path, dataset: &Dataset) -> AppResult<()> {
    create_dir(dir)?;

    let path = dir.join(CUSTOMERS_FILE);
    let mut w = create_file(&path)?;
    writeln!(w, "{}", CUSTOMER_HEADER.join(",")).map_err(io(&path))?;
    for c in dataset.customers() {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            c.id, c.longitude, c.latitude, c.class, c.contract_status, c.wires, c.voltage
        )
        .map_err(io(&path))?;
    }
    finish(&path, w)?;

    let path = dir.join(READINGS_FILE);
    let mut w = create_file(&path)?;
    writeln!(w, "{}", READING_HEADER.join(",")).map_err(io(&path))?;
    for r in dataset.readings() {
        writeln!(w, "{},{},{}", r.customer, r.date.format("%Y-%m-%d"), r.consumption_kwh).map_err(io(&path))?;
    }
    finish(&path, w)?;

    let path = dir.join(INSPECTIONS_FILE);
    let mut w = create_file(&path)?;
    writeln!(w, "{}", INSPECTION_HEADER.join(",")).map_err(io(&path))?;
    for i in dataset.inspections() {
        writeln!(w, "{},{},{}", i.customer, i.date.format("%Y-%m-%d"), u8::from(i.ntl_found)).map_err(io(&path))?;
    }
    finish(&path, w)
}
