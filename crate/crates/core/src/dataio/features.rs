use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::WeatherRecord;
use crate::error::{Error, Result};

pub const FEATURE_DIM: usize = 8;

pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "temperature",
    "humidity",
    "pressure",
    "wind_speed",
    "sin_wind_direction",
    "cos_wind_direction",
    "sin_time_of_day",
    "cos_time_of_day",
];

const SECONDS_PER_DAY: i64 = 86_400;

/// Network input for one record, in [`FEATURE_NAMES`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_DIM]);

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Expands the two cyclical variables (wind direction, UTC time of day)
/// into sin/cos pairs; the four scalar variables pass through unchanged.
pub fn encode_features(record: &WeatherRecord) -> FeatureVector {
    let wind = record.wind_direction.to_radians();
    let day_fraction = record.timestamp.rem_euclid(SECONDS_PER_DAY) as f64 / SECONDS_PER_DAY as f64;
    let tod = day_fraction * TAU;
    FeatureVector([
        record.temperature,
        record.humidity,
        record.pressure,
        record.wind_speed,
        wind.sin(),
        wind.cos(),
        tod.sin(),
        tod.cos(),
    ])
}

/// Z-score parameters for inputs and the regression target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub target_mean: f64,
    pub target_std: f64,
}

impl Scaler {
    /// Population mean and standard deviation per column. A column with zero
    /// spread is rejected rather than patched with an epsilon.
    pub fn fit<R: AsRef<[f64]>>(rows: &[R], targets: &[f64], names: &[&str]) -> Result<Scaler> {
        if rows.len() != targets.len() {
            return Err(Error::Shape(format!(
                "{} feature rows but {} targets",
                rows.len(),
                targets.len()
            )));
        }
        if rows.len() < 2 {
            return Err(Error::EmptyInput(format!(
                "scaler needs at least 2 rows, got {}",
                rows.len()
            )));
        }
        let dim = names.len();
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != dim) {
            return Err(Error::Shape(format!(
                "row {bad} has {} features, expected {dim}",
                rows[bad].as_ref().len()
            )));
        }

        let mut mean = Vec::with_capacity(dim);
        let mut std = Vec::with_capacity(dim);
        for (col, name) in names.iter().enumerate() {
            let (m, s) = moments(rows.iter().map(|r| r.as_ref()[col]), rows.len());
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::ZeroVariance((*name).to_string()));
            }
            mean.push(m);
            std.push(s);
        }
        let (target_mean, target_std) = moments(targets.iter().copied(), targets.len());
        if !(target_std > 0.0 && target_std.is_finite()) {
            return Err(Error::ZeroVariance("radiation".into()));
        }
        Ok(Scaler {
            mean,
            std,
            target_mean,
            target_std,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Checks the invariants of a scaler that did not come from [`Scaler::fit`].
    pub fn validate(&self) -> Result<()> {
        if self.mean.len() != self.std.len() {
            return Err(Error::Shape(format!(
                "scaler has {} means but {} deviations",
                self.mean.len(),
                self.std.len()
            )));
        }
        let finite = self
            .mean
            .iter()
            .chain([&self.target_mean])
            .all(|v| v.is_finite());
        let positive = self
            .std
            .iter()
            .chain([&self.target_std])
            .all(|s| *s > 0.0 && s.is_finite());
        if !finite || !positive {
            return Err(Error::Config(
                "scaler needs finite means and strictly positive deviations".into(),
            ));
        }
        Ok(())
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }

    pub fn invert(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(z, (m, s))| z * s + m)
            .collect()
    }

    pub fn scale_target(&self, y: f64) -> f64 {
        (y - self.target_mean) / self.target_std
    }

    pub fn unscale_target(&self, z: f64) -> f64 {
        z * self.target_std + self.target_mean
    }
}

/// Fits a [`Scaler`] on encoded weather features.
pub fn fit_scaler(rows: &[FeatureVector], targets: &[f64]) -> Result<Scaler> {
    Scaler::fit(rows, targets, &FEATURE_NAMES)
}

fn moments(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let n = n as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Standardized design matrix (row-major) and targets, plus the scaler that
/// produced them.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    dim: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
    timestamps: Vec<i64>,
    scaler: Scaler,
}

impl FeatureMatrix {
    /// Encodes `records`, fits the scaler on the rows listed in `fit_rows`
    /// (normally the training partition) and standardizes every row with it.
    pub fn fit_records(records: &[WeatherRecord], fit_rows: &[usize]) -> Result<FeatureMatrix> {
        let encoded: Vec<FeatureVector> = records.iter().map(encode_features).collect();
        let fit_x: Vec<FeatureVector> = select(&encoded, fit_rows)?;
        let fit_y: Vec<f64> = select(records, fit_rows)?
            .iter()
            .map(|r| r.radiation)
            .collect();
        let scaler = fit_scaler(&fit_x, &fit_y)?;
        Self::with_scaler(records, scaler)
    }

    /// Encodes and standardizes `records` with an existing scaler.
    pub fn with_scaler(records: &[WeatherRecord], scaler: Scaler) -> Result<FeatureMatrix> {
        scaler.validate()?;
        if scaler.dim() != FEATURE_DIM {
            return Err(Error::Shape(format!(
                "scaler covers {} features, weather encoding has {FEATURE_DIM}",
                scaler.dim()
            )));
        }
        let mut inputs = Vec::with_capacity(records.len() * FEATURE_DIM);
        let mut targets = Vec::with_capacity(records.len());
        for r in records {
            inputs.extend(scaler.apply(&encode_features(r).0));
            targets.push(scaler.scale_target(r.radiation));
        }
        Ok(FeatureMatrix {
            dim: FEATURE_DIM,
            inputs,
            targets,
            timestamps: records.iter().map(|r| r.timestamp).collect(),
            scaler,
        })
    }

    /// Builds a matrix from arbitrary raw rows (synthetic data, experiments).
    /// Timestamps are the row indices.
    pub fn fit_raw(
        rows: &[Vec<f64>],
        targets: &[f64],
        fit_rows: &[usize],
        names: &[&str],
    ) -> Result<FeatureMatrix> {
        let fit_x = select(rows, fit_rows)?;
        let fit_y = select(targets, fit_rows)?;
        let scaler = Scaler::fit(&fit_x, &fit_y, names)?;
        let mut inputs = Vec::with_capacity(rows.len() * names.len());
        for r in rows {
            inputs.extend(scaler.apply(r));
        }
        Ok(FeatureMatrix {
            dim: names.len(),
            inputs,
            targets: targets.iter().map(|&y| scaler.scale_target(y)).collect(),
            timestamps: (0..rows.len() as i64).collect(),
            scaler,
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    /// Standardized target.
    pub fn target(&self, i: usize) -> f64 {
        self.targets[i]
    }

    /// Target in physical units (W/m²).
    pub fn physical_target(&self, i: usize) -> f64 {
        self.scaler.unscale_target(self.targets[i])
    }

    pub fn timestamp(&self, i: usize) -> i64 {
        self.timestamps[i]
    }

    pub fn scaler(&self) -> &Scaler {
        &self.scaler
    }
}

fn select<T: Clone>(items: &[T], indices: &[usize]) -> Result<Vec<T>> {
    indices
        .iter()
        .map(|&i| {
            items.get(i).cloned().ok_or_else(|| {
                Error::Shape(format!(
                    "row index {i} out of range for {} rows",
                    items.len()
                ))
            })
        })
        .collect()
}
