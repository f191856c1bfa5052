//! Model files, format v1.
//!
//! Plain text, one record per line, fields separated by single spaces.
//! Floats use Rust's shortest round-trip notation, so reading a file back
//! gives bit-identical parameters. A bundle is:
//!
//! ```text
//! gridntl-model v1
//! feature_set <time_series_only|all_features>
//! train_proportion <f64>
//! fold <usize>
//! seed <u64>
//! grid_sizes <usize>...
//! months <usize>
//! variance_p <f64>
//! vocabulary <seven|eight>
//! inclusion <include|exclude>
//! columns <n>
//! <column name>                        n lines
//! retained_binary <usize>...
//! scalers <n>
//! <mean> <std> | -                      n lines, `-` for unscaled columns
//! <model section>
//! end
//! ```
//!
//! Model sections:
//!
//! ```text
//! model lr|svm
//! loss <cross_entropy|hinge>
//! c <f64>
//! bias <f64>
//! objective <initial> <final> <epochs run>
//! weights <f64>...
//!
//! model knn
//! k <usize>
//! distance <euclidean|manhattan|cosine>
//! shape <rows> <cols>
//! <label 0/1> <f64>...                  one line per stored row
//!
//! model rf
//! n_features <usize>
//! max_features <usize>
//! sample_fraction <f64>
//! seed <u64>
//! trees <n>
//! tree <node count>                      then one line per node:
//! S <feature> <threshold> <left> <right>
//! L <positive fraction> <samples>
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use gridntl_core::features::{ClassVocabulary, ColumnScaler, FeatureConfig, FeaturePlan, FeatureSet, Normalizer};
use gridntl_core::geogrid::SelfInclusion;
use gridntl_core::learners::{
    DecisionTree, Distance, ForestModel, KnnModel, LinearModel, LossKind, ModelKind, Node, TrainedModel,
};
use gridntl_core::Matrix;

use crate::error::{AppError, AppResult};

pub const MAGIC: &str = "gridntl-model v1";

/// A trained model with everything needed to featurize new samples for it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub feature_set: FeatureSet,
    pub train_proportion: f64,
    pub fold: usize,
    pub seed: u64,
    pub features: FeatureConfig,
    pub plan: FeaturePlan,
    pub model: TrainedModel,
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_linear(out: &mut String, m: &LinearModel) {
    let _ = writeln!(out, "loss {}", m.loss.token());
    let _ = writeln!(out, "c {}", m.c);
    let _ = writeln!(out, "bias {}", m.bias);
    let _ = writeln!(out, "objective {} {} {}", m.initial_loss, m.final_loss, m.epochs_run);
    let _ = writeln!(out, "weights {}", join(&m.weights));
}

/// The model section alone.
pub fn model_to_text(model: &TrainedModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {}", model.kind().token());
    match model {
        TrainedModel::Logistic(m) | TrainedModel::Svm(m) => write_linear(&mut out, m),
        TrainedModel::Knn(m) => {
            let _ = writeln!(out, "k {}", m.k);
            let _ = writeln!(out, "distance {}", m.distance.token());
            let _ = writeln!(out, "shape {} {}", m.data.rows(), m.data.cols());
            for (row, label) in m.data.iter_rows().zip(&m.labels) {
                if row.is_empty() {
                    let _ = writeln!(out, "{}", u8::from(*label));
                } else {
                    let _ = writeln!(out, "{} {}", u8::from(*label), join(row));
                }
            }
        }
        TrainedModel::Forest(m) => {
            let _ = writeln!(out, "n_features {}", m.n_features);
            let _ = writeln!(out, "max_features {}", m.max_features);
            let _ = writeln!(out, "sample_fraction {}", m.sample_fraction);
            let _ = writeln!(out, "seed {}", m.seed);
            let _ = writeln!(out, "trees {}", m.trees.len());
            for t in &m.trees {
                let _ = writeln!(out, "tree {}", t.nodes.len());
                for n in &t.nodes {
                    match n {
                        Node::Split {
                            feature,
                            threshold,
                            left,
                            right,
                        } => {
                            let _ = writeln!(out, "S {feature} {threshold} {left} {right}");
                        }
                        Node::Leaf {
                            positive_fraction,
                            samples,
                        } => {
                            let _ = writeln!(out, "L {positive_fraction} {samples}");
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn bundle_to_text(b: &ModelBundle) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "feature_set {}", b.feature_set.token());
    let _ = writeln!(out, "train_proportion {}", b.train_proportion);
    let _ = writeln!(out, "fold {}", b.fold);
    let _ = writeln!(out, "seed {}", b.seed);
    let _ = writeln!(out, "grid_sizes {}", join(&b.features.grid_sizes));
    let _ = writeln!(out, "months {}", b.features.months);
    let _ = writeln!(out, "variance_p {}", b.features.variance_p);
    let _ = writeln!(out, "vocabulary {}", b.features.vocabulary.token());
    let _ = writeln!(out, "inclusion {}", b.features.inclusion.token());
    let _ = writeln!(out, "columns {}", b.plan.columns.len());
    for c in &b.plan.columns {
        let _ = writeln!(out, "{c}");
    }
    let _ = writeln!(out, "retained_binary {}", join(&b.plan.retained_binary));
    let _ = writeln!(out, "scalers {}", b.plan.normalizer.scalers.len());
    for s in &b.plan.normalizer.scalers {
        match s {
            Some(s) => {
                let _ = writeln!(out, "{} {}", s.mean, s.std);
            }
            None => out.push_str("-\n"),
        }
    }
    out.push_str(&model_to_text(&b.model));
    out.push_str("end\n");
    out
}

type ParseResult<T> = Result<T, (u64, String)>;

struct Cursor<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    line: u64,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate(),
            line: 0,
        }
    }

    fn fail<T>(&self, msg: impl Into<String>) -> ParseResult<T> {
        Err((self.line, msg.into()))
    }

    fn next_line(&mut self) -> ParseResult<&'a str> {
        match self.lines.next() {
            Some((i, l)) => {
                self.line = i as u64 + 1;
                Ok(l)
            }
            None => Err((self.line + 1, "unexpected end of file".into())),
        }
    }

    fn tokens(&mut self) -> ParseResult<Vec<&'a str>> {
        Ok(self.next_line()?.split(' ').filter(|t| !t.is_empty()).collect())
    }

    /// Values following `key` on the next line.
    fn keyed(&mut self, key: &str) -> ParseResult<Vec<&'a str>> {
        let t = self.tokens()?;
        if t.first() != Some(&key) {
            return self.fail(format!("expected `{key}`"));
        }
        Ok(t[1..].to_vec())
    }

    fn parse<T: FromStr>(&self, s: &str) -> ParseResult<T> {
        s.parse().or_else(|_| self.fail(format!("cannot parse `{s}`")))
    }

    fn one<T: FromStr>(&mut self, key: &str) -> ParseResult<T> {
        let v = self.keyed(key)?;
        if v.len() != 1 {
            return self.fail(format!("`{key}` takes one value"));
        }
        self.parse(v[0])
    }

    fn list<T: FromStr>(&mut self, key: &str) -> ParseResult<Vec<T>> {
        let v = self.keyed(key)?;
        v.iter().map(|s| self.parse(s)).collect()
    }

    fn token_of<T>(&mut self, key: &str, from: impl Fn(&str) -> Option<T>) -> ParseResult<T> {
        let v = self.keyed(key)?;
        match v.as_slice() {
            [t] => from(t).map_or_else(|| self.fail(format!("unknown {key} `{t}`")), Ok),
            _ => self.fail(format!("`{key}` takes one value")),
        }
    }
}

fn parse_linear(c: &mut Cursor) -> ParseResult<LinearModel> {
    let loss = c.token_of("loss", LossKind::from_token)?;
    let cc = c.one("c")?;
    let bias = c.one("bias")?;
    let obj = c.keyed("objective")?;
    if obj.len() != 3 {
        return c.fail("`objective` takes three values");
    }
    let (initial_loss, final_loss, epochs_run) = (c.parse(obj[0])?, c.parse(obj[1])?, c.parse(obj[2])?);
    let weights = c.list("weights")?;
    Ok(LinearModel {
        weights,
        bias,
        loss,
        c: cc,
        initial_loss,
        final_loss,
        epochs_run,
    })
}

fn parse_model(c: &mut Cursor) -> ParseResult<TrainedModel> {
    let kind = c.token_of("model", ModelKind::from_token)?;
    Ok(match kind {
        ModelKind::Logistic => TrainedModel::Logistic(parse_linear(c)?),
        ModelKind::Svm => TrainedModel::Svm(parse_linear(c)?),
        ModelKind::Knn => {
            let k = c.one("k")?;
            let distance = c.token_of("distance", Distance::from_token)?;
            let shape: Vec<usize> = c.list("shape")?;
            let [rows, cols] = shape[..] else {
                return c.fail("`shape` takes two values");
            };
            let mut data = Vec::with_capacity(rows * cols);
            let mut labels = Vec::with_capacity(rows);
            for _ in 0..rows {
                let t = c.tokens()?;
                if t.len() != cols + 1 {
                    return c.fail(format!("expected a label and {cols} values"));
                }
                labels.push(match t[0] {
                    "1" => true,
                    "0" => false,
                    other => return c.fail(format!("label `{other}` is not 0/1")),
                });
                for s in &t[1..] {
                    data.push(c.parse(s)?);
                }
            }
            let data = Matrix::from_vec(rows, cols, data).or_else(|e| c.fail(e.to_string()))?;
            TrainedModel::Knn(KnnModel {
                data,
                labels,
                k,
                distance,
            })
        }
        ModelKind::Forest => {
            let n_features = c.one("n_features")?;
            let max_features = c.one("max_features")?;
            let sample_fraction = c.one("sample_fraction")?;
            let seed = c.one("seed")?;
            let count: usize = c.one("trees")?;
            let mut trees = Vec::with_capacity(count);
            for _ in 0..count {
                let n: usize = c.one("tree")?;
                let mut nodes = Vec::with_capacity(n);
                for _ in 0..n {
                    let t = c.tokens()?;
                    let node = match t.as_slice() {
                        ["S", f, th, l, r] => {
                            let (feature, left, right): (usize, usize, usize) = (c.parse(f)?, c.parse(l)?, c.parse(r)?);
                            if feature >= n_features || left >= n || right >= n {
                                return c.fail("split refers outside the tree or feature range");
                            }
                            Node::Split {
                                feature,
                                threshold: c.parse(th)?,
                                left,
                                right,
                            }
                        }
                        ["L", p, s] => Node::Leaf {
                            positive_fraction: c.parse(p)?,
                            samples: c.parse(s)?,
                        },
                        _ => return c.fail("expected an `S` or `L` node"),
                    };
                    nodes.push(node);
                }
                trees.push(DecisionTree { nodes });
            }
            TrainedModel::Forest(ForestModel {
                trees,
                n_features,
                max_features,
                sample_fraction,
                seed,
            })
        }
    })
}

fn parse_bundle(text: &str) -> ParseResult<ModelBundle> {
    let mut c = Cursor::new(text);
    if c.next_line()? != MAGIC {
        return c.fail(format!("not a `{MAGIC}` file"));
    }
    let feature_set = c.token_of("feature_set", FeatureSet::from_token)?;
    let train_proportion = c.one("train_proportion")?;
    let fold = c.one("fold")?;
    let seed = c.one("seed")?;
    let features = FeatureConfig {
        grid_sizes: c.list("grid_sizes")?,
        months: c.one("months")?,
        variance_p: c.one("variance_p")?,
        vocabulary: c.token_of("vocabulary", ClassVocabulary::from_token)?,
        inclusion: c.token_of("inclusion", SelfInclusion::from_token)?,
        workers: 1,
    };
    let n: usize = c.one("columns")?;
    let mut columns = Vec::with_capacity(n);
    for _ in 0..n {
        columns.push(c.next_line()?.to_string());
    }
    let retained_binary = c.list("retained_binary")?;
    let n: usize = c.one("scalers")?;
    let mut scalers = Vec::with_capacity(n);
    for _ in 0..n {
        let t = c.tokens()?;
        scalers.push(match t.as_slice() {
            ["-"] => None,
            [m, s] => Some(ColumnScaler {
                mean: c.parse(m)?,
                std: c.parse(s)?,
            }),
            _ => return c.fail("expected `<mean> <std>` or `-`"),
        });
    }
    let model = parse_model(&mut c)?;
    if c.next_line()? != "end" {
        return c.fail("expected `end`");
    }
    Ok(ModelBundle {
        feature_set,
        train_proportion,
        fold,
        seed,
        features,
        plan: FeaturePlan {
            retained_binary,
            normalizer: Normalizer { scalers },
            columns,
        },
        model,
    })
}

/// Parses a bundle; errors carry `path` and the offending line.
pub fn bundle_from_text(path: &Path, text: &str) -> AppResult<ModelBundle> {
    parse_bundle(text).map_err(|(line, msg)| AppError::parse(path, line, msg))
}

/// Parses a bare model section followed by nothing else.
pub fn model_from_text(text: &str) -> Result<TrainedModel, (u64, String)> {
    let mut c = Cursor::new(text);
    let m = parse_model(&mut c)?;
    if c.lines.next().is_some() {
        return c.fail("trailing content after the model");
    }
    Ok(m)
}

pub fn write_bundle(path: &Path, b: &ModelBundle) -> AppResult<()> {
    crate::io::write_text(path, &bundle_to_text(b))
}

pub fn read_bundle(path: &Path) -> AppResult<ModelBundle> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    bundle_from_text(path, &text)
}
