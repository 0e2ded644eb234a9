//! Synthetic magnetic-navigation data: uniformly sampled Earth-surface field
//! vectors, heading targets, and their normalized forms.
//!
//! Files: `train.csv` and `test.csv` with header
//! `Bx_nT,By_nT,Bz_nT,heading_deg`, plus a `dataset.json` sidecar carrying the
//! seed, counts, bounds and normalization constants.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::create_file;

pub const TRAIN_FILE: &str = "train.csv";
pub const TEST_FILE: &str = "test.csv";
pub const META_FILE: &str = "dataset.json";
pub const CSV_HEADER: [&str; 4] = ["Bx_nT", "By_nT", "Bz_nT", "heading_deg"];

/// Degrees per unit of normalized target.
pub const TARGET_SCALE_DEG: f64 = 360.0;

/// Open sampling interval per field axis, in nT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBounds {
    pub bx: [f64; 2],
    pub by: [f64; 2],
    pub bz: [f64; 2],
}

impl Default for FieldBounds {
    fn default() -> Self {
        FieldBounds {
            bx: [-43_000.0, 43_000.0],
            by: [-18_000.0, 17_000.0],
            bz: [-67_000.0, 62_000.0],
        }
    }
}

impl FieldBounds {
    pub fn axes(&self) -> [[f64; 2]; 3] {
        [self.bx, self.by, self.bz]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in ["bx", "by", "bz"].into_iter().zip(self.axes()) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!(
                    "field bounds for {name} must be finite with lower < upper, got [{lo}, {hi}]"
                )));
            }
            if lo == 0.0 && hi == 0.0 {
                return Err(Error::Config(format!(
                    "field bounds for {name} are degenerate"
                )));
            }
        }
        Ok(())
    }

    /// Per-axis `max(|lo|, |hi|)`; the default bounds give (43000, 18000, 67000).
    pub fn max_abs(&self) -> [f64; 3] {
        self.axes().map(|[lo, hi]| lo.abs().max(hi.abs()))
    }
}

/// Argument order handed to `atan2` when computing headings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgOrder {
    /// `atan2(B_x, B_y)`.
    #[default]
    Verbatim,
    /// `atan2(B_y, B_x)`.
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeadingConvention {
    #[serde(default)]
    pub arg_order: ArgOrder,
    /// Reduce headings into `[0, 360)` instead of keeping `(-360, 360]`.
    #[serde(default)]
    pub wrap: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub b_raw: [f64; 3],
    pub x_norm: [f64; 3],
    pub y_raw: f64,
    pub y_norm: f64,
}

impl Sample {
    pub fn from_field(b: [f64; 3], bounds: &FieldBounds, conv: HeadingConvention) -> Result<Self> {
        let y_raw = heading(b, conv)?;
        Ok(Sample {
            b_raw: b,
            x_norm: normalize_input(b, bounds)?,
            y_raw,
            y_norm: normalize_target(y_raw),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub seed: u64,
    pub k_train: usize,
    pub k_test: usize,
    pub bounds: FieldBounds,
    pub heading: HeadingConvention,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            seed: 7,
            k_train: 200,
            k_test: 50,
            bounds: FieldBounds::default(),
            heading: HeadingConvention::default(),
        }
    }
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_train == 0 || self.k_test == 0 {
            return Err(Error::Config(format!(
                "dataset counts must be >= 1, got train={} test={}",
                self.k_train, self.k_test
            )));
        }
        self.bounds.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    pub seed: u64,
    pub config: DatasetConfig,
}

fn uniform_open<R: Rng + ?Sized>(rng: &mut R, [lo, hi]: [f64; 2]) -> f64 {
    loop {
        let v = rng.random_range(lo..hi);
        if v > lo {
            return v;
        }
    }
}

/// One field vector, each component uniform on its open interval.
pub fn sample_field<R: Rng + ?Sized>(rng: &mut R, bounds: &FieldBounds) -> [f64; 3] {
    bounds.axes().map(|axis| uniform_open(rng, axis))
}

/// `2·atan2(B_x, B_y)` in degrees, range `(-360, 360]` unless wrapped.
pub fn heading(b: [f64; 3], conv: HeadingConvention) -> Result<f64> {
    let [bx, by, _] = b;
    if bx == 0.0 && by == 0.0 {
        return Err(Error::Domain(
            "heading undefined for zero horizontal field".into(),
        ));
    }
    let rad = match conv.arg_order {
        ArgOrder::Verbatim => bx.atan2(by),
        ArgOrder::Swapped => by.atan2(bx),
    };
    let deg = (2.0 * rad).to_degrees();
    Ok(if conv.wrap {
        deg.rem_euclid(360.0)
    } else {
        deg
    })
}

/// `π · B_i / max_abs_i` per axis.
pub fn normalize_input(b: [f64; 3], bounds: &FieldBounds) -> Result<[f64; 3]> {
    let max_abs = bounds.max_abs();
    let mut out = [0.0; 3];
    for i in 0..3 {
        if !b[i].is_finite() || b[i].abs() > max_abs[i] {
            return Err(Error::Domain(format!(
                "field component {i} = {} outside ±{}",
                b[i], max_abs[i]
            )));
        }
        out[i] = PI * (b[i] / max_abs[i]);
    }
    Ok(out)
}

pub fn normalize_target(y_deg: f64) -> f64 {
    y_deg / TARGET_SCALE_DEG
}

fn draw_samples(rng: &mut ChaCha8Rng, count: usize, cfg: &DatasetConfig) -> Vec<Sample> {
    (0..count)
        .map(|_| loop {
            // a zero horizontal field has probability zero but is redrawn
            if let Ok(s) =
                Sample::from_field(sample_field(rng, &cfg.bounds), &cfg.bounds, cfg.heading)
            {
                break s;
            }
        })
        .collect()
}

/// Train then test samples drawn from one seeded stream.
pub fn make_dataset(cfg: &DatasetConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let train = draw_samples(&mut rng, cfg.k_train, cfg);
    let test = draw_samples(&mut rng, cfg.k_test, cfg);
    Ok(Dataset {
        train,
        test,
        seed: cfg.seed,
        config: cfg.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub seed: u64,
    pub k_train: usize,
    pub k_test: usize,
    pub bounds: FieldBounds,
    pub heading: HeadingConvention,
    pub input_max_abs_nt: [f64; 3],
    pub target_scale_deg: f64,
    pub train_file: String,
    pub test_file: String,
}

impl Dataset {
    pub fn meta(&self) -> DatasetMeta {
        DatasetMeta {
            seed: self.seed,
            k_train: self.train.len(),
            k_test: self.test.len(),
            bounds: self.config.bounds,
            heading: self.config.heading,
            input_max_abs_nt: self.config.bounds.max_abs(),
            target_scale_deg: TARGET_SCALE_DEG,
            train_file: TRAIN_FILE.into(),
            test_file: TEST_FILE.into(),
        }
    }

    /// Writes the two sample files and the sidecar into `dir`.
    pub fn write_dir(&self, dir: &Path, force: bool) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_samples(&dir.join(TRAIN_FILE), &self.train, force)?;
        write_samples(&dir.join(TEST_FILE), &self.test, force)?;
        let mut f = create_file(&dir.join(META_FILE), force)?;
        serde_json::to_writer_pretty(&mut f, &self.meta())?;
        std::io::Write::write_all(&mut f, b"\n")?;
        Ok(())
    }

    /// Reads a directory written by [`Dataset::write_dir`]. Normalized
    /// fields are recomputed from the raw columns and the sidecar bounds.
    pub fn read_dir(dir: &Path) -> Result<Self> {
        let meta: DatasetMeta = serde_json::from_reader(fs::File::open(dir.join(META_FILE))?)?;
        let config = DatasetConfig {
            seed: meta.seed,
            k_train: meta.k_train,
            k_test: meta.k_test,
            bounds: meta.bounds,
            heading: meta.heading,
        };
        config.validate()?;
        let train = read_samples(&dir.join(&meta.train_file), &config.bounds)?;
        let test = read_samples(&dir.join(&meta.test_file), &config.bounds)?;
        if train.len() != meta.k_train || test.len() != meta.k_test {
            return Err(Error::Format(format!(
                "sidecar declares {}/{} samples, files hold {}/{}",
                meta.k_train,
                meta.k_test,
                train.len(),
                test.len()
            )));
        }
        Ok(Dataset {
            train,
            test,
            seed: meta.seed,
            config,
        })
    }
}

pub fn write_samples(path: &Path, samples: &[Sample], force: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(create_file(path, force)?);
    w.write_record(CSV_HEADER)?;
    for s in samples {
        let [bx, by, bz] = s.b_raw;
        w.write_record([bx, by, bz, s.y_raw].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples(path: &Path, bounds: &FieldBounds) -> Result<Vec<Sample>> {
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::Format(format!(
            "{}: expected header {}",
            path.display(),
            CSV_HEADER.join(",")
        )));
    }
    r.records()
        .map(|rec| {
            let rec = rec?;
            let vals = rec
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|e| {
                        Error::Format(format!("{}: bad number {f:?}: {e}", path.display()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let [bx, by, bz, y_raw] = vals[..] else {
                return Err(Error::Format(format!(
                    "{}: expected 4 columns",
                    path.display()
                )));
            };
            Ok(Sample {
                b_raw: [bx, by, bz],
                x_norm: normalize_input([bx, by, bz], bounds)?,
                y_raw,
                y_norm: normalize_target(y_raw),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const VERBATIM: HeadingConvention = HeadingConvention {
        arg_order: ArgOrder::Verbatim,
        wrap: false,
    };

    #[test]
    fn heading_axis_cases() {
        assert_eq!(heading([0.0, 5.0, 1.0], VERBATIM).unwrap(), 0.0);
        assert!((heading([5.0, 0.0, 1.0], VERBATIM).unwrap() - 180.0).abs() < 1e-12);
        assert!((heading([1000.0, 1000.0, 0.0], VERBATIM).unwrap() - 90.0).abs() < 1e-12);
        assert!(matches!(
            heading([0.0, 0.0, 3.0], VERBATIM),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn heading_range_and_wrap() {
        // atan2(0, -1) = π → 360°, the closed end of (-360, 360]
        assert!((heading([0.0, -1.0, 0.0], VERBATIM).unwrap() - 360.0).abs() < 1e-12);
        let wrapped = HeadingConvention {
            wrap: true,
            ..VERBATIM
        };
        assert!((heading([-1.0, 1.0, 0.0], wrapped).unwrap() - 270.0).abs() < 1e-12);
        let swapped = HeadingConvention {
            arg_order: ArgOrder::Swapped,
            wrap: false,
        };
        assert_eq!(heading([0.0, 5.0, 0.0], swapped).unwrap(), 180.0);
    }

    #[test]
    fn input_normalization() {
        let b = FieldBounds::default();
        assert_eq!(normalize_input([0.0; 3], &b).unwrap(), [0.0; 3]);
        assert_eq!(normalize_input([43_000.0, 0.0, 0.0], &b).unwrap()[0], PI);
        let x = normalize_input([21_500.0, -9_000.0, 33_500.0], &b).unwrap();
        for (got, want) in x.iter().zip([PI / 2.0, -PI / 2.0, PI / 2.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(matches!(
            normalize_input([0.0, 18_001.0, 0.0], &b),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn target_normalization() {
        assert_eq!(normalize_target(0.0), 0.0);
        assert_eq!(normalize_target(360.0), 1.0);
        assert_eq!(normalize_target(90.0), 0.25);
    }

    #[test]
    fn bad_bounds_rejected() {
        let mut b = FieldBounds {
            by: [5.0, -5.0],
            ..Default::default()
        };
        assert!(matches!(b.validate(), Err(Error::Config(_))));
        b.by = [f64::NAN, 1.0];
        assert!(b.validate().is_err());
    }

    #[test]
    fn dataset_defaults_and_ranges() {
        let d = make_dataset(&DatasetConfig::default()).unwrap();
        assert_eq!((d.train.len(), d.test.len()), (200, 50));
        for s in d.train.iter().chain(&d.test) {
            assert!(s.b_raw[0] > -43_000.0 && s.b_raw[0] < 43_000.0);
            assert!(s.b_raw[1] > -18_000.0 && s.b_raw[1] < 17_000.0);
            assert!(s.b_raw[2] > -67_000.0 && s.b_raw[2] < 62_000.0);
            assert!(s.x_norm.iter().all(|x| x.abs() <= PI));
            assert!((-1.0..=1.0).contains(&s.y_norm));
        }
    }

    #[test]
    fn dataset_is_seeded() {
        let cfg = DatasetConfig {
            seed: 7,
            ..Default::default()
        };
        assert_eq!(make_dataset(&cfg).unwrap(), make_dataset(&cfg).unwrap());
        let other = DatasetConfig {
            seed: 8,
            ..Default::default()
        };
        assert_ne!(
            make_dataset(&cfg).unwrap().train,
            make_dataset(&other).unwrap().train
        );
    }

    #[test]
    fn zero_counts_rejected() {
        let cfg = DatasetConfig {
            k_test: 0,
            ..Default::default()
        };
        assert!(matches!(make_dataset(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = make_dataset(&DatasetConfig {
            k_train: 20,
            k_test: 5,
            ..Default::default()
        })
        .unwrap();
        d.write_dir(dir.path(), false).unwrap();
        assert_eq!(Dataset::read_dir(dir.path()).unwrap(), d);
        assert!(matches!(
            d.write_dir(dir.path(), false),
            Err(Error::Exists(_))
        ));
        d.write_dir(dir.path(), true).unwrap();
    }
}
