use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use crate::dataset::CustomerId;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Named columns keyed by customer.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Block {
    pub names: Vec<String>,
    pub rows: BTreeMap<CustomerId, Vec<f64>>,
}

impl Block {
    pub fn width(&self) -> usize {
        self.names.len()
    }
}

/// Column ranges of the three feature groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnBlocks {
    pub neighborhood: Range<usize>,
    pub consumption: Range<usize>,
    pub binary: Range<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureSet {
    /// Daily average consumption only.
    TimeSeriesOnly,
    /// Neighborhood, consumption and retained master data.
    AllFeatures,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 2] = [FeatureSet::TimeSeriesOnly, FeatureSet::AllFeatures];

    pub fn token(self) -> &'static str {
        match self {
            FeatureSet::TimeSeriesOnly => "time_series_only",
            FeatureSet::AllFeatures => "all_features",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.token() == s)
    }
}

/// Rows of inspected customers with aligned binary targets.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub customers: Vec<CustomerId>,
    pub columns: Vec<String>,
    pub blocks: ColumnBlocks,
    pub data: Matrix,
    pub targets: Vec<bool>,
}

impl FeatureMatrix {
    /// Column indices used by a feature set.
    pub fn columns_for(&self, set: FeatureSet) -> Vec<usize> {
        match set {
            FeatureSet::TimeSeriesOnly => self.blocks.consumption.clone().collect(),
            FeatureSet::AllFeatures => (0..self.columns.len()).collect(),
        }
    }

    pub fn continuous_columns(&self) -> Vec<usize> {
        self.blocks
            .neighborhood
            .clone()
            .chain(self.blocks.consumption.clone())
            .collect()
    }

    /// Rows `rows` restricted to the columns of `set`, with their targets.
    pub fn view(&self, set: FeatureSet, rows: &[usize]) -> (Matrix, Vec<bool>) {
        let m = self.data.select_rows(rows).select_cols(&self.columns_for(set));
        (m, rows.iter().map(|&i| self.targets[i]).collect())
    }
}

fn check_block(name: &str, block: &Block, keys: &[(CustomerId, bool)]) -> Result<()> {
    if block.rows.len() != keys.len() {
        return Err(Error::Alignment(format!(
            "{name} block has {} rows, targets have {}",
            block.rows.len(),
            keys.len()
        )));
    }
    for (id, _) in keys {
        let row = block
            .rows
            .get(id)
            .ok_or_else(|| Error::Alignment(format!("{name} block has no row for customer {id}")))?;
        if row.len() != block.width() {
            return Err(Error::Alignment(format!(
                "{name} row for customer {id} has {} values, expected {}",
                row.len(),
                block.width()
            )));
        }
    }
    Ok(())
}

/// Concatenates the three blocks row by row in `targets` order.
pub fn assemble_matrix(
    neighborhood: &Block,
    consumption: &Block,
    binary: &Block,
    targets: &[(CustomerId, bool)],
) -> Result<FeatureMatrix> {
    check_block("neighborhood", neighborhood, targets)?;
    check_block("consumption", consumption, targets)?;
    check_block("binary", binary, targets)?;
    let a = neighborhood.width();
    let b = a + consumption.width();
    let c = b + binary.width();
    let mut data = Vec::with_capacity(targets.len() * c);
    for (id, _) in targets {
        data.extend_from_slice(&neighborhood.rows[id]);
        data.extend_from_slice(&consumption.rows[id]);
        data.extend_from_slice(&binary.rows[id]);
    }
    let columns = neighborhood
        .names
        .iter()
        .chain(&consumption.names)
        .chain(&binary.names)
        .cloned()
        .collect();
    Ok(FeatureMatrix {
        customers: targets.iter().map(|t| t.0).collect(),
        columns,
        blocks: ColumnBlocks {
            neighborhood: 0..a,
            consumption: a..b,
            binary: b..c,
        },
        data: Matrix::from_vec(targets.len(), c, data)?,
        targets: targets.iter().map(|t| t.1).collect(),
    })
}
