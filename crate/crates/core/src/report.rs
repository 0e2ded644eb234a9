//! Result files for training runs and pipeline comparisons.
//!
//! A training run directory holds
//!
//! * `results.json`: config echo, seeds, final losses, wall clock;
//! * `curves.csv`: header `epoch,trial,train_loss,test_loss`, epochs from 1;
//! * `params_trial_<t>.txt`: final parameters, one value per line.
//!
//! A comparison directory holds `comparison.csv` (header
//! `epoch,ico_train,ico_test,def_train,def_test`) and `comparison.json`.
//! Losses are in normalized target units; multiply by
//! [`DEG2_PER_UNIT`] for squared degrees under MSE.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::TARGET_SCALE_DEG;
use crate::error::{Error, Result};
use crate::training::{TrainConfig, TrainReport};

pub const RESULTS_FILE: &str = "results.json";
pub const CURVES_FILE: &str = "curves.csv";
pub const CUMULATIVE_CURVES_FILE: &str = "curves_cumulative.csv";
pub const COMPARISON_CSV: &str = "comparison.csv";
pub const COMPARISON_JSON: &str = "comparison.json";
pub const CURVES_HEADER: [&str; 4] = ["epoch", "trial", "train_loss", "test_loss"];
pub const COMPARISON_HEADER: [&str; 5] =
    ["epoch", "ico_train", "ico_test", "def_train", "def_test"];

/// Squared degrees per squared normalized unit.
pub const DEG2_PER_UNIT: f64 = TARGET_SCALE_DEG * TARGET_SCALE_DEG;

pub fn params_file_name(trial: usize) -> String {
    format!("params_trial_{trial}.txt")
}

/// Opens `path` for writing, refusing to replace an existing file unless
/// `force` is set.
pub fn create_file(path: &Path, force: bool) -> Result<BufWriter<File>> {
    if !force && path.exists() {
        return Err(Error::Exists(path.to_path_buf()));
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json<T: Serialize>(path: &Path, value: &T, force: bool) -> Result<()> {
    let mut f = create_file(path, force)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub seed: u64,
    pub epochs_completed: usize,
    pub first_train_loss: Option<f64>,
    pub final_train_loss: Option<f64>,
    pub final_test_loss: Option<f64>,
    pub aborted: Option<String>,
    pub params_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub config: TrainConfig,
    pub dataset_seed: u64,
    pub trials: Vec<TrialSummary>,
    pub mean_final_train_loss: Option<f64>,
    pub mean_final_test_loss: Option<f64>,
    pub loss_units: String,
    pub deg2_per_unit: f64,
    pub wall_clock_seconds: f64,
}

impl ResultsFile {
    pub fn from_report(report: &TrainReport) -> Self {
        ResultsFile {
            config: report.config.clone(),
            dataset_seed: report.dataset_seed,
            trials: report
                .trials
                .iter()
                .map(|t| TrialSummary {
                    trial: t.trial,
                    seed: t.seed,
                    epochs_completed: t.train_loss.len(),
                    first_train_loss: t.train_loss.first().copied(),
                    final_train_loss: t.train_loss.last().copied(),
                    final_test_loss: t.test_loss.last().copied(),
                    aborted: t.aborted.clone(),
                    params_file: params_file_name(t.trial),
                })
                .collect(),
            mean_final_train_loss: report.mean_train_curve.last().copied(),
            mean_final_test_loss: report.mean_test_curve.last().copied(),
            loss_units: format!("normalized target (heading_deg / {TARGET_SCALE_DEG})"),
            deg2_per_unit: DEG2_PER_UNIT,
            wall_clock_seconds: report.wall_clock_seconds,
        }
    }

    pub fn read(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(File::open(
            dir.join(RESULTS_FILE),
        )?)?)
    }
}

/// Running sums of a per-epoch curve.
pub fn cumulative(curve: &[f64]) -> Vec<f64> {
    curve
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

fn write_curves<F>(path: &Path, report: &TrainReport, transform: F, force: bool) -> Result<()>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut w = csv::Writer::from_writer(create_file(path, force)?);
    w.write_record(CURVES_HEADER)?;
    for t in &report.trials {
        let (train, test) = (transform(&t.train_loss), transform(&t.test_loss));
        for (e, (tr, te)) in train.iter().zip(&test).enumerate() {
            w.write_record([
                (e + 1).to_string(),
                t.trial.to_string(),
                tr.to_string(),
                te.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes every file of a training run into `dir` and returns their paths.
pub fn write_report(
    dir: &Path,
    report: &TrainReport,
    cumulative_curves: bool,
    force: bool,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let results = dir.join(RESULTS_FILE);
    write_json(&results, &ResultsFile::from_report(report), force)?;
    written.push(results);

    let curves = dir.join(CURVES_FILE);
    write_curves(&curves, report, <[f64]>::to_vec, force)?;
    written.push(curves);
    if cumulative_curves {
        let path = dir.join(CUMULATIVE_CURVES_FILE);
        write_curves(&path, report, cumulative, force)?;
        written.push(path);
    }

    for t in &report.trials {
        let path = dir.join(params_file_name(t.trial));
        let mut f = create_file(&path, force)?;
        for p in &t.final_params {
            writeln!(f, "{p}")?;
        }
        f.flush()?;
        written.push(path);
    }
    Ok(written)
}

pub fn read_params(path: &Path) -> Result<Vec<f64>> {
    fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse()
                .map_err(|e| Error::Format(format!("{}: bad parameter {l:?}: {e}", path.display())))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub epoch: usize,
    pub trial: usize,
    pub train_loss: f64,
    pub test_loss: f64,
}

pub fn read_curves(path: &Path) -> Result<Vec<CurveRow>> {
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().ne(CURVES_HEADER) {
        return Err(Error::Format(format!(
            "{}: expected header {}",
            path.display(),
            CURVES_HEADER.join(",")
        )));
    }
    let bad = |f: &str| Error::Format(format!("{}: bad field {f:?}", path.display()));
    r.records()
        .map(|rec| {
            let rec = rec?;
            if rec.len() != 4 {
                return Err(Error::Format(format!(
                    "{}: expected 4 columns",
                    path.display()
                )));
            }
            Ok(CurveRow {
                epoch: rec[0].parse().map_err(|_| bad(&rec[0]))?,
                trial: rec[1].parse().map_err(|_| bad(&rec[1]))?,
                train_loss: rec[2].parse().map_err(|_| bad(&rec[2]))?,
                test_loss: rec[3].parse().map_err(|_| bad(&rec[3]))?,
            })
        })
        .collect()
}

/// Per-epoch means across trials, `(train, test)`, indexed from epoch 1.
/// Only epochs reached by every listed trial are kept.
pub fn mean_curves(rows: &[CurveRow]) -> (Vec<f64>, Vec<f64>) {
    use std::collections::BTreeMap;
    let mut by_trial: BTreeMap<usize, Vec<&CurveRow>> = BTreeMap::new();
    for row in rows {
        by_trial.entry(row.trial).or_default().push(row);
    }
    let Some(len) = by_trial.values().map(Vec::len).min() else {
        return (Vec::new(), Vec::new());
    };
    let n = by_trial.len() as f64;
    let mut train = vec![0.0; len];
    let mut test = vec![0.0; len];
    for trial_rows in by_trial.values() {
        for row in trial_rows {
            if (1..=len).contains(&row.epoch) {
                train[row.epoch - 1] += row.train_loss;
                test[row.epoch - 1] += row.test_loss;
            }
        }
    }
    (
        train.into_iter().map(|v| v / n).collect(),
        test.into_iter().map(|v| v / n).collect(),
    )
}

/// First epoch (1-based) whose value is strictly below `threshold`.
pub fn epochs_to_threshold(curve: &[f64], threshold: f64) -> Option<usize> {
    curve.iter().position(|v| *v < threshold).map(|i| i + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Reached {
    Epoch(usize),
    NotReached(String),
}

impl From<Option<usize>> for Reached {
    fn from(v: Option<usize>) -> Self {
        match v {
            Some(e) => Reached::Epoch(e),
            None => Reached::NotReached("not reached".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub threshold: f64,
    pub epochs: usize,
    pub ico_epochs_to_threshold: Reached,
    pub def_epochs_to_threshold: Reached,
    pub ico_final_train: f64,
    pub ico_final_test: f64,
    pub def_final_train: f64,
    pub def_final_test: f64,
    /// `max_e |ico_train(e) − def_train(e)|`.
    pub max_abs_train_gap: f64,
    pub max_abs_test_gap: f64,
    /// Whether the switched pipeline reached the threshold strictly earlier.
    /// Measured, not asserted.
    pub ico_converges_faster: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub ico_train: Vec<f64>,
    pub ico_test: Vec<f64>,
    pub def_train: Vec<f64>,
    pub def_test: Vec<f64>,
    pub summary: ComparisonSummary,
}

/// Config fields that must agree for two runs to be comparable.
fn comparable(a: &TrainConfig, b: &TrainConfig) -> std::result::Result<(), String> {
    let checks = [
        ("n_layers", a.n_layers == b.n_layers),
        ("n_qubits", a.n_qubits == b.n_qubits),
        ("epochs", a.epochs == b.epochs),
        ("learning_rate", a.learning_rate == b.learning_rate),
        ("batch_size", a.batch_size == b.batch_size),
        ("n_trials", a.n_trials == b.n_trials),
        ("loss_kind", a.loss_kind == b.loss_kind),
        ("seed", a.seed == b.seed),
        ("init_scheme", a.init_scheme == b.init_scheme),
    ];
    let bad: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| *n)
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad.join(", "))
    }
}

/// Aligns the mean curves of two run directories.
pub fn compare_dirs(ico_dir: &Path, def_dir: &Path, threshold: f64) -> Result<Comparison> {
    let ico_res = ResultsFile::read(ico_dir)?;
    let def_res = ResultsFile::read(def_dir)?;
    comparable(&ico_res.config, &def_res.config)
        .map_err(|fields| Error::Mismatch(format!("run configs differ in: {fields}")))?;
    if ico_res.dataset_seed != def_res.dataset_seed {
        return Err(Error::Mismatch(format!(
            "dataset seeds differ: {} vs {}",
            ico_res.dataset_seed, def_res.dataset_seed
        )));
    }
    let (ico_train, ico_test) = mean_curves(&read_curves(&ico_dir.join(CURVES_FILE))?);
    let (def_train, def_test) = mean_curves(&read_curves(&def_dir.join(CURVES_FILE))?);
    compare_curves(ico_train, ico_test, def_train, def_test, threshold)
}

pub fn compare_curves(
    ico_train: Vec<f64>,
    ico_test: Vec<f64>,
    def_train: Vec<f64>,
    def_test: Vec<f64>,
    threshold: f64,
) -> Result<Comparison> {
    let epochs = ico_train.len();
    if epochs == 0
        || [ico_test.len(), def_train.len(), def_test.len()]
            .iter()
            .any(|&l| l != epochs)
    {
        return Err(Error::Mismatch(format!(
            "curve lengths differ or are empty: ico {}/{} definite {}/{}",
            ico_train.len(),
            ico_test.len(),
            def_train.len(),
            def_test.len()
        )));
    }
    let gap = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let ico_hit = epochs_to_threshold(&ico_train, threshold);
    let def_hit = epochs_to_threshold(&def_train, threshold);
    let ico_converges_faster = match (ico_hit, def_hit) {
        (Some(i), Some(d)) => Some(i < d),
        (Some(_), None) => Some(true),
        (None, Some(_)) => Some(false),
        (None, None) => None,
    };
    let summary = ComparisonSummary {
        threshold,
        epochs,
        ico_epochs_to_threshold: ico_hit.into(),
        def_epochs_to_threshold: def_hit.into(),
        ico_final_train: ico_train[epochs - 1],
        ico_final_test: ico_test[epochs - 1],
        def_final_train: def_train[epochs - 1],
        def_final_test: def_test[epochs - 1],
        max_abs_train_gap: gap(&ico_train, &def_train),
        max_abs_test_gap: gap(&ico_test, &def_test),
        ico_converges_faster,
    };
    Ok(Comparison {
        ico_train,
        ico_test,
        def_train,
        def_test,
        summary,
    })
}

pub fn write_comparison(dir: &Path, cmp: &Comparison, force: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(COMPARISON_CSV);
    let mut w = csv::Writer::from_writer(create_file(&csv_path, force)?);
    w.write_record(COMPARISON_HEADER)?;
    for e in 0..cmp.summary.epochs {
        w.write_record([
            (e + 1).to_string(),
            cmp.ico_train[e].to_string(),
            cmp.ico_test[e].to_string(),
            cmp.def_train[e].to_string(),
            cmp.def_test[e].to_string(),
        ])?;
    }
    w.flush()?;
    let json_path = dir.join(COMPARISON_JSON);
    write_json(&json_path, &cmp.summary, force)?;
    Ok(vec![csv_path, json_path])
}
