//! Weather log ingestion: CSV parsing, feature encoding, standardization,
//! partitioning and descriptive statistics.

mod features;
mod records;
mod split;
mod stats;

pub use features::{
    encode_features, fit_scaler, FeatureMatrix, FeatureVector, Scaler, FEATURE_DIM, FEATURE_NAMES,
};
pub use records::{parse_csv, write_csv, Field, Schema};
pub use split::{split_chronological, split_dataset, DatasetSplit, DEFAULT_RATIOS};
pub use stats::{format_sig6, histogram, monthly_stats, HistogramBin, MonthlyStats};

/// One timestamped observation row.
///
/// Units are whatever the source logger wrote; nothing is converted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeatherRecord {
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
    /// Global horizontal irradiance, W/m².
    pub radiation: f64,
    pub temperature: f64,
    pub pressure: f64,
    /// Relative humidity, percent in [0, 100].
    pub humidity: f64,
    /// Degrees in [0, 360).
    pub wind_direction: f64,
    /// m/s.
    pub wind_speed: f64,
}
