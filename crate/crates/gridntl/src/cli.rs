use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Arg, ArgAction, ArgMatches, Command};
use gridntl_core::dataset::{generate_synthetic, sample_proportion, Dataset};
use gridntl_core::diststats::per_class_feature_moments;
use gridntl_core::evaluation::{
    cross_validated_train, prepare_proportion, report_on, run_experiment_matrix, EvalReport, ExperimentConfig,
    PreparedProportion,
};
use gridntl_core::features::{extract_features, FeatureSet};
use gridntl_core::geogrid;
use gridntl_core::learners::ModelKind;
use gridntl_core::seed::{self, Stage};
use log::{info, warn};

use crate::config::{RunConfig, KEYS, WORKERS_ENV};
use crate::error::{AppError, AppResult, Context};
use crate::export;
use crate::io;
use crate::model::{read_bundle, write_bundle, ModelBundle};

pub const CONFIG_ECHO: &str = "config.txt";
pub const FAILURE_MANIFEST: &str = "failures.txt";

const COMMANDS: &[(&str, &str)] = &[
    ("generate", "write a synthetic dataset to --data"),
    ("sample", "draw the --proportion sample from --data into --out"),
    ("featurize", "write the feature matrix of every proportion"),
    ("stats", "write per-class moments of the neighborhood features"),
    ("train", "cross-validate one model at --proportion and save it to --model-file"),
    ("evaluate", "score --model-file on the --proportion test split"),
    ("matrix", "run the full proportion x model x feature-set experiment"),
];

pub fn command() -> Command {
    let mut cmd = Command::new("gridntl")
        .about("Neighborhood-feature NTL detection experiments")
        .subcommand_required(true)
        .args_override_self(true)
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_name("FILE")
                .help("key = value config file; flags override it"),
        )
        .arg(
            Arg::new("quiet")
                .long("quiet")
                .short('q')
                .global(true)
                .action(ArgAction::SetTrue)
                .help("only warnings and errors on stderr"),
        );
    for (key, help) in KEYS {
        cmd = cmd.arg(Arg::new(*key).long(*key).global(true).value_name("VALUE").help(*help));
    }
    for (name, about) in COMMANDS {
        cmd = cmd.subcommand(Command::new(*name).about(*about).args_override_self(true));
    }
    cmd
}

/// Defaults, then the config file, then the environment, then flags.
pub fn resolve_config(m: &ArgMatches) -> AppResult<RunConfig> {
    let mut cfg = RunConfig::default();
    let sub = m.subcommand().map(|(_, s)| s).unwrap_or(m);
    if let Some(path) = sub.get_one::<String>("config") {
        cfg.apply_file(Path::new(path))?;
    }
    if let Ok(w) = std::env::var(WORKERS_ENV) {
        cfg.set("workers", &w)
            .map_err(|e| AppError::Usage(format!("{WORKERS_ENV}: {e}")))?;
    }
    for (key, _) in KEYS {
        if let Some(v) = sub.get_one::<String>(key) {
            cfg.set(key, v).map_err(|e| AppError::Usage(format!("--{key}: {e}")))?;
        }
    }
    Ok(cfg)
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let quiet = matches
        .subcommand()
        .is_some_and(|(_, s)| s.get_flag("quiet"));
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if quiet {
        "warn"
    } else {
        "info"
    }))
    .format_timestamp(None)
    .try_init();
    match dispatch(&matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(m: &ArgMatches) -> AppResult<()> {
    let cfg = resolve_config(m)?;
    cfg.validate()?;
    let name = m.subcommand_name().unwrap_or_default();
    io::create_dir(&cfg.out)?;
    io::write_text(&cfg.out.join(CONFIG_ECHO), &cfg.to_text())?;
    let started = Instant::now();
    match name {
        "generate" => cmd_generate(&cfg),
        "sample" => cmd_sample(&cfg),
        "featurize" => cmd_featurize(&cfg),
        "stats" => cmd_stats(&cfg),
        "train" => cmd_train(&cfg),
        "evaluate" => cmd_evaluate(&cfg),
        "matrix" => cmd_matrix(&cfg),
        other => Err(AppError::Usage(format!("unknown command `{other}`"))),
    }?;
    info!("{name} finished in {:.1}s", started.elapsed().as_secs_f64());
    Ok(())
}

fn load_clean(cfg: &RunConfig) -> AppResult<Dataset> {
    let ds = io::read_dataset(&cfg.data)?;
    let (clean, removed) =
        geogrid::drop_coordinate_outliers(&ds, cfg.k_sigma, cfg.outlier_rule).context(|| "outlier removal".into())?;
    info!(
        "loaded {} customers from {}, removed {} coordinate outliers",
        ds.customers().len(),
        cfg.data.display(),
        removed.len()
    );
    Ok(clean)
}

fn prop_tag(q: f64) -> String {
    format!("q{q}")
}

pub fn cmd_generate(cfg: &RunConfig) -> AppResult<()> {
    let ds = generate_synthetic(&cfg.synthetic()).context(|| "generate".into())?;
    io::write_dataset(&cfg.data, &ds)?;
    let rate = ds
        .ntl_rate()
        .map_or_else(|| "n/a".to_string(), |r| format!("{r:.4}"));
    println!(
        "customers {} readings {} inspections {} ntl_rate {rate}",
        ds.customers().len(),
        ds.readings().len(),
        ds.inspections().len()
    );
    Ok(())
}

pub fn cmd_sample(cfg: &RunConfig) -> AppResult<()> {
    let clean = load_clean(cfg)?;
    let s = seed::derive(cfg.seed, Stage::Sample, cfg.proportion_index() as u64);
    let sample = sample_proportion(&clean, cfg.proportion, cfg.sample_size, s)
        .context(|| format!("sample at proportion {}", cfg.proportion))?;
    let dir = cfg.out.join(format!("sample_{}", prop_tag(cfg.proportion)));
    io::write_dataset(&dir, &sample)?;
    println!(
        "sample {} inspections {} ntl_rate {:.4} -> {}",
        cfg.proportion,
        sample.inspections().len(),
        sample.ntl_rate().unwrap_or(0.0),
        dir.display()
    );
    Ok(())
}

fn prepare(clean: &Dataset, q: f64, index: usize, exp: &ExperimentConfig) -> AppResult<PreparedProportion> {
    prepare_proportion(clean, q, index, exp).context(|| format!("proportion {q}"))
}

pub fn cmd_featurize(cfg: &RunConfig) -> AppResult<()> {
    let clean = load_clean(cfg)?;
    let exp = cfg.experiment();
    for (i, &q) in cfg.proportions.iter().enumerate() {
        let p = prepare(&clean, q, i, &exp)?;
        let tag = prop_tag(q);
        export::write_feature_matrix(&cfg.out.join(format!("features_{tag}.csv")), &p.matrix, &p.split.test)?;
        export::write_json(&cfg.out.join(format!("features_{tag}.json")), &export::feature_manifest(&p))?;
        export::write_grids(&cfg.out.join(format!("grids_{tag}.csv")), &p.raw.grids)?;
        info!(
            "proportion {q}: {} rows, {} columns, {} of {} binary features retained",
            p.matrix.targets.len(),
            p.matrix.columns.len(),
            p.plan.retained_binary.len(),
            p.raw.binary.names.len()
        );
        println!("{q} rows {} columns {}", p.matrix.targets.len(), p.matrix.columns.len());
    }
    Ok(())
}

pub fn cmd_stats(cfg: &RunConfig) -> AppResult<()> {
    let clean = load_clean(cfg)?;
    let features = cfg.features();
    let mut rows = Vec::new();
    for (i, &q) in cfg.proportions.iter().enumerate() {
        let s = seed::derive(cfg.seed, Stage::Sample, i as u64);
        let sample = sample_proportion(&clean, q, cfg.sample_size, s).context(|| format!("sample at proportion {q}"))?;
        let raw = extract_features(&sample, &features).context(|| format!("features at proportion {q}"))?;
        rows.extend(per_class_feature_moments(&raw, q));
    }
    export::write_moments(&cfg.out.join("moments.csv"), &rows)?;
    export::write_moments_long(&cfg.out.join("moments.dat"), &rows)?;
    println!("moments rows {}", rows.len());
    Ok(())
}

/// Training seed of a (proportion, model, feature set) task; the matrix
/// command uses the same keys.
fn task_seed(cfg: &RunConfig, index: usize, model: ModelKind, set: FeatureSet) -> u64 {
    let m = ModelKind::ALL.iter().position(|k| *k == model).unwrap_or(0) as u64;
    let f = FeatureSet::ALL.iter().position(|k| *k == set).unwrap_or(0) as u64;
    seed::derive(cfg.seed, Stage::Train, (index as u64 * 4 + m) * 2 + f)
}

fn resolve_out(cfg: &RunConfig, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        cfg.out.join(path)
    }
}

pub fn cmd_train(cfg: &RunConfig) -> AppResult<()> {
    let clean = load_clean(cfg)?;
    let index = cfg.proportion_index();
    let exp = cfg.experiment();
    let p = prepare(&clean, cfg.proportion, index, &exp)?;
    let seed = task_seed(cfg, index, cfg.model, cfg.feature_set);
    let selected = cross_validated_train(
        &p.matrix,
        &p.split,
        cfg.model,
        cfg.feature_set,
        &exp.params,
        seed,
        cfg.workers,
    )
    .context(|| format!("training {}", cfg.model.token()))?;
    let report = report_on(&selected, &p.matrix, &p.split.test, cfg.proportion, cfg.proportion, cfg.workers)
        .context(|| "test evaluation".into())?;
    let bundle = ModelBundle {
        feature_set: cfg.feature_set,
        train_proportion: cfg.proportion,
        fold: selected.fold,
        seed,
        features: cfg.features(),
        plan: p.plan.clone(),
        model: selected.model,
    };
    let path = resolve_out(cfg, &cfg.model_file);
    write_bundle(&path, &bundle)?;
    println!(
        "{} {} fold {} validation_auc {} test_auc {} -> {}",
        cfg.model.token(),
        cfg.feature_set.token(),
        selected.fold,
        selected.validation.auc,
        report.auc,
        path.display()
    );
    Ok(())
}

pub fn cmd_evaluate(cfg: &RunConfig) -> AppResult<()> {
    let path = resolve_out(cfg, &cfg.model_file);
    let bundle = read_bundle(&path)?;
    let clean = load_clean(cfg)?;
    let mut exp = cfg.experiment();
    exp.features = bundle.features.clone();
    exp.features.workers = cfg.workers;
    let p = prepare(&clean, cfg.proportion, cfg.proportion_index(), &exp)?;
    let matrix = bundle.plan.apply(&p.raw).context(|| "applying the model's feature plan".into())?;
    let (x, y) = matrix.view(bundle.feature_set, &p.split.test);
    let m = gridntl_core::evaluation::evaluate_on_test(&bundle.model, &x, &y, cfg.workers)
        .context(|| "test evaluation".into())?;
    let report = EvalReport {
        model: bundle.model.kind(),
        feature_set: bundle.feature_set,
        train_proportion: bundle.train_proportion,
        test_proportion: cfg.proportion,
        auc: m.auc,
        recall: m.recall,
        specificity: m.specificity,
        counts: m.counts,
        fold: bundle.fold,
        seed: bundle.seed,
    };
    export::write_reports(&cfg.out.join("evaluate.csv"), std::slice::from_ref(&report))?;
    println!("{}", export::report_line(&report));
    Ok(())
}

/// Range and identity checks every report must pass.
pub fn check_reports(reports: &[EvalReport]) -> AppResult<()> {
    for r in reports {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(unit(r.auc) && unit(r.recall) && unit(r.specificity)) {
            return Err(AppError::Assertion(format!("metric outside [0, 1]: {}", export::report_line(r))));
        }
        if r.auc != (r.recall + r.specificity) / 2.0 {
            return Err(AppError::Assertion(format!(
                "auc != (recall + specificity) / 2: {}",
                export::report_line(r)
            )));
        }
    }
    Ok(())
}

pub fn cmd_matrix(cfg: &RunConfig) -> AppResult<()> {
    let ds = io::read_dataset(&cfg.data)?;
    let out = run_experiment_matrix(&ds, &cfg.experiment()).context(|| "experiment matrix".into())?;
    info!("removed {} coordinate outliers", out.removed_outliers);
    for p in &out.proportions {
        info!(
            "proportion {}: {} rows ({} positive), {} columns, {} binary retained",
            p.proportion,
            p.rows,
            p.positives,
            p.columns.len(),
            p.retained_binary
        );
    }
    export::write_reports(&cfg.out.join("reports.csv"), &out.reports)?;
    export::write_reports(&cfg.out.join("cross_reports.csv"), &out.cross)?;
    export::write_summary(&cfg.out.join("summary.csv"), &out.summary)?;
    export::write_moments(&cfg.out.join("moments.csv"), &out.moments)?;
    export::write_moments_long(&cfg.out.join("moments.dat"), &out.moments)?;
    let manifest = cfg.out.join(FAILURE_MANIFEST);
    if out.failures.is_empty() {
        if manifest.exists() {
            std::fs::remove_file(&manifest).map_err(|e| AppError::io(&manifest, e))?;
        }
    } else {
        export::write_failures(&manifest, &out.failures)?;
    }
    check_reports(&out.reports)?;
    check_reports(&out.cross)?;
    for s in &out.summary {
        println!(
            "{} max {:.4} min {:.4} mean {:.4} std {:.4}",
            s.model.token(),
            s.max_auc,
            s.min_auc,
            s.mean_auc,
            s.std_auc
        );
    }
    if !out.failures.is_empty() {
        for f in &out.failures {
            warn!("{}: {}", f.task, f.message);
        }
        return Err(AppError::TaskFailures {
            count: out.failures.len(),
            manifest,
        });
    }
    Ok(())
}
