use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dataset::{ContractStatus, CustomerClass, CustomerRecord, Voltage, Wires};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_VARIANCE_P: f64 = 0.9;

/// Tolerance for the ones-fraction and variance comparisons, so that a
/// fraction sitting exactly on `p` is not lost to rounding.
const BOUNDARY_EPS: f64 = 1e-12;

/// Customer-class vocabulary: the seven enumerated classes, or those plus
/// `other` (16 indicators in total).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClassVocabulary {
    #[default]
    Seven,
    Eight,
}

impl ClassVocabulary {
    pub fn token(self) -> &'static str {
        match self {
            ClassVocabulary::Seven => "seven",
            ClassVocabulary::Eight => "eight",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        [ClassVocabulary::Seven, ClassVocabulary::Eight].into_iter().find(|v| v.token() == s)
    }

    fn classes(self) -> &'static [CustomerClass] {
        match self {
            ClassVocabulary::Seven => &CustomerClass::ALL[..7],
            ClassVocabulary::Eight => CustomerClass::ALL,
        }
    }

    pub fn width(self) -> usize {
        self.classes().len() + ContractStatus::ALL.len() + Wires::ALL.len() + Voltage::ALL.len()
    }
}

/// Indicator column names in canonical order.
pub fn binary_column_names(vocabulary: ClassVocabulary) -> Vec<String> {
    let mut names = Vec::with_capacity(vocabulary.width());
    names.extend(vocabulary.classes().iter().map(|c| format!("{}={}", CustomerClass::FIELD, c)));
    names.extend(ContractStatus::ALL.iter().map(|c| format!("{}={}", ContractStatus::FIELD, c)));
    names.extend(Wires::ALL.iter().map(|c| format!("{}={}", Wires::FIELD, c)));
    names.extend(Voltage::ALL.iter().map(|c| format!("{}={}", Voltage::FIELD, c)));
    names
}

/// One row of indicators per customer, exactly one `1.0` per category group.
pub fn one_hot_encode(customers: &[CustomerRecord], vocabulary: ClassVocabulary) -> Result<Matrix> {
    let classes = vocabulary.classes();
    let width = vocabulary.width();
    let mut m = Matrix::zeros(customers.len(), width);
    for (r, c) in customers.iter().enumerate() {
        let class = classes
            .iter()
            .position(|k| *k == c.class)
            .ok_or_else(|| Error::Encoding {
                field: CustomerClass::FIELD,
                token: c.class.token().into(),
            })?;
        let mut offset = 0;
        m.set(r, offset + class, 1.0);
        offset += classes.len();
        m.set(r, offset + c.contract_status as usize, 1.0);
        offset += ContractStatus::ALL.len();
        m.set(r, offset + c.wires as usize, 1.0);
        offset += Wires::ALL.len();
        m.set(r, offset + c.voltage as usize, 1.0);
    }
    Ok(m)
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.5 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("variance threshold p must be in (0.5, 1], got {p}")))
    }
}

fn ones_fraction(m: &Matrix, j: usize) -> f64 {
    let ones = (0..m.rows()).filter(|&i| m.get(i, j) != 0.0).count();
    ones as f64 / m.rows() as f64
}

/// Indices of binary columns that are neither one nor zero in more than
/// `p * 100`% of rows, i.e. whose ones-fraction lies in `[1 - p, p]`.
pub fn filter_binary_features(m: &Matrix, p: f64) -> Result<Vec<usize>> {
    check_p(p)?;
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    Ok((0..m.cols())
        .filter(|&j| {
            let f = ones_fraction(m, j);
            f >= 1.0 - p - BOUNDARY_EPS && f <= p + BOUNDARY_EPS
        })
        .collect())
}

/// Same selection stated on the Bernoulli variance: keep columns whose
/// `f (1 - f)` is at least `p (1 - p)`.
pub fn filter_binary_features_by_variance(m: &Matrix, p: f64) -> Result<Vec<usize>> {
    check_p(p)?;
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let floor = p * (1.0 - p);
    Ok((0..m.cols())
        .filter(|&j| {
            let f = ones_fraction(m, j);
            f * (1.0 - f) >= floor - BOUNDARY_EPS
        })
        .collect())
}
