//! Output files other than datasets and models.

use std::io::Write;
use std::path::Path;

use gridntl_core::diststats::ClassMoments;
use gridntl_core::evaluation::{EvalReport, PreparedProportion, SummaryRow, TaskFailure};
use gridntl_core::features::FeatureMatrix;
use gridntl_core::geogrid::Grid;
use serde_json::json;

use crate::error::{AppError, AppResult};
use crate::io::{create_file, write_text};

const NA: &str = "NA";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), |v| v.to_string())
}

/// Builds a file line by line and writes it once.
struct Lines(String);

impl Lines {
    fn new(header: &str) -> Self {
        Lines(format!("{header}\n"))
    }

    fn push(&mut self, line: impl AsRef<str>) {
        self.0.push_str(line.as_ref());
        self.0.push('\n');
    }

    fn save(self, path: &Path) -> AppResult<()> {
        write_text(path, &self.0)
    }
}

/// Non-empty cells of every grid.
pub fn write_grids(path: &Path, grids: &[Grid]) -> AppResult<()> {
    let mut out = Lines::new("grid_size,i,j,customers,inspected,ntl,inspected_ratio,ntl_ratio");
    for g in grids {
        for c in g.cells() {
            out.push(format!(
                "{},{},{},{},{},{},{},{}",
                g.spec.cells_per_axis,
                c.i,
                c.j,
                c.num_customers,
                c.num_inspected,
                c.num_ntl,
                c.inspected_ratio,
                c.ntl_ratio
            ));
        }
    }
    out.save(path)
}

/// `customer_id,split,target,<columns...>` with `split` one of test/pool.
pub fn write_feature_matrix(path: &Path, m: &FeatureMatrix, test_rows: &[usize]) -> AppResult<()> {
    let mut w = create_file(path)?;
    let io = |e| AppError::io(path, e);
    writeln!(w, "customer_id,split,target,{}", m.columns.join(",")).map_err(io)?;
    for (i, id) in m.customers.iter().enumerate() {
        let split = if test_rows.binary_search(&i).is_ok() { "test" } else { "pool" };
        write!(w, "{id},{split},{}", u8::from(m.targets[i])).map_err(io)?;
        for v in m.data.row(i) {
            write!(w, ",{v}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn feature_manifest(p: &PreparedProportion) -> serde_json::Value {
    let m = &p.matrix;
    json!({
        "ntl_proportion": p.proportion,
        "sample_seed": p.sample_seed,
        "split_seed": p.split.seed,
        "rows": m.targets.len(),
        "positives": m.targets.iter().filter(|t| **t).count(),
        "test_rows": p.split.test.len(),
        "folds": p.split.folds.iter().map(Vec::len).collect::<Vec<_>>(),
        "columns": m.columns,
        "blocks": {
            "neighborhood": [m.blocks.neighborhood.start, m.blocks.neighborhood.end],
            "consumption": [m.blocks.consumption.start, m.blocks.consumption.end],
            "binary": [m.blocks.binary.start, m.blocks.binary.end],
        },
        "retained_binary": p.plan.retained_binary.len(),
        "missing_month_customers": p.raw.missing_months.len(),
        "zero_interval_customers": p.raw.flagged.len(),
    })
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> AppResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json values always serialize");
    text.push('\n');
    write_text(path, &text)
}

pub fn write_moments(path: &Path, rows: &[ClassMoments]) -> AppResult<()> {
    let mut out = Lines::new(
        "feature,grid_size,ntl_proportion,class,mean,variance_pop,variance_sample,skewness,kurtosis_excess",
    );
    for r in rows {
        let m = r.moments.as_ref();
        out.push(format!(
            "{},{},{},{},{},{},{},{},{}",
            r.feature.token(),
            r.grid_size,
            r.ntl_proportion,
            u8::from(r.class),
            opt(m.map(|m| m.mean)),
            opt(m.map(|m| m.variance)),
            opt(m.and_then(|m| m.sample_variance())),
            opt(m.and_then(|m| m.skewness)),
            opt(m.and_then(|m| m.kurtosis_excess)),
        ));
    }
    out.save(path)
}

/// One gnuplot data block per (feature, grid, class, statistic), blocks
/// separated by two blank lines so `index` selects them; rows are
/// `ntl_proportion value`. Undefined values are `NA`
/// (`set datafile missing "NA"`).
pub fn write_moments_long(path: &Path, rows: &[ClassMoments]) -> AppResult<()> {
    type Stat = fn(&ClassMoments) -> Option<f64>;
    let stats: [(&str, Stat); 4] = [
        ("mean", |r| r.moments.as_ref().map(|m| m.mean)),
        ("variance", |r| r.moments.as_ref().map(|m| m.variance)),
        ("skewness", |r| r.moments.as_ref().and_then(|m| m.skewness)),
        ("kurtosis_excess", |r| r.moments.as_ref().and_then(|m| m.kurtosis_excess)),
    ];
    let mut keys: Vec<(&str, usize, bool)> = rows.iter().map(|r| (r.feature.token(), r.grid_size, r.class)).collect();
    keys.sort();
    keys.dedup();
    let mut text = String::new();
    let mut index = 0;
    for (feature, grid, class) in keys {
        for (stat, f) in &stats {
            if index > 0 {
                text.push_str("\n\n");
            }
            text.push_str(&format!(
                "# index {index}: {feature} grid {grid} class {} {stat}\n",
                u8::from(class)
            ));
            let mut series: Vec<&ClassMoments> = rows
                .iter()
                .filter(|r| r.feature.token() == feature && r.grid_size == grid && r.class == class)
                .collect();
            series.sort_by(|a, b| a.ntl_proportion.total_cmp(&b.ntl_proportion));
            for r in series {
                text.push_str(&format!("{} {}\n", r.ntl_proportion, opt(f(r))));
            }
            index += 1;
        }
    }
    write_text(path, &text)
}

pub const REPORT_HEADER: &str = "model,feature_set,train_prop,test_prop,auc,recall,specificity,fold,seed";

pub fn report_line(r: &EvalReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.model.token(),
        r.feature_set.token(),
        r.train_proportion,
        r.test_proportion,
        r.auc,
        r.recall,
        r.specificity,
        r.fold,
        r.seed
    )
}

pub fn write_reports(path: &Path, reports: &[EvalReport]) -> AppResult<()> {
    let mut out = Lines::new(REPORT_HEADER);
    for r in reports {
        out.push(report_line(r));
    }
    out.save(path)
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> AppResult<()> {
    let mut out = Lines::new("model,max_auc,min_auc,mean_auc,std_auc");
    for s in rows {
        out.push(format!(
            "{},{},{},{},{}",
            s.model.token(),
            s.max_auc,
            s.min_auc,
            s.mean_auc,
            s.std_auc
        ));
    }
    out.save(path)
}

/// One `task<TAB>message` line per failure.
pub fn write_failures(path: &Path, failures: &[TaskFailure]) -> AppResult<()> {
    let mut text = String::new();
    for f in failures {
        text.push_str(&format!("{}\t{}\n", f.task, f.message));
    }
    write_text(path, &text)
}
