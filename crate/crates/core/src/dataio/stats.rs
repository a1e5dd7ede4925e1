use std::collections::BTreeMap;

use chrono::{DateTime, Datelike};

use super::WeatherRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonthlyStats {
    pub year: i32,
    pub month: u32,
    pub count: usize,
    pub mean_radiation: f64,
    pub mean_temperature: f64,
    pub mean_pressure: f64,
}

/// Arithmetic means of the raw radiation, temperature and pressure columns
/// per UTC calendar month, in chronological order.
pub fn monthly_stats(records: &[WeatherRecord]) -> Result<Vec<MonthlyStats>> {
    if records.is_empty() {
        return Err(Error::EmptyInput(
            "no records for monthly statistics".into(),
        ));
    }
    let mut sums: BTreeMap<(i32, u32), (usize, f64, f64, f64)> = BTreeMap::new();
    for r in records {
        let dt = DateTime::from_timestamp(r.timestamp, 0).ok_or_else(|| {
            Error::Config(format!(
                "timestamp {} outside the calendar range",
                r.timestamp
            ))
        })?;
        let e = sums.entry((dt.year(), dt.month())).or_default();
        e.0 += 1;
        e.1 += r.radiation;
        e.2 += r.temperature;
        e.3 += r.pressure;
    }
    Ok(sums
        .into_iter()
        .map(|((year, month), (n, rad, temp, pres))| {
            let n_f = n as f64;
            MonthlyStats {
                year,
                month,
                count: n,
                mean_radiation: rad / n_f,
                mean_temperature: temp / n_f,
                mean_pressure: pres / n_f,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub low: f64,
    pub high: f64,
    pub count: usize,
}

/// Equal-width histogram over [min, max]; the maximum lands in the last bin.
/// When every value is identical all of them go into the first bin.
pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<HistogramBin>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("no values to histogram".into()));
    }
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|k| HistogramBin {
            low: lo + width * k as f64,
            high: if k + 1 == bins {
                hi
            } else {
                lo + width * (k + 1) as f64
            },
            count: 0,
        })
        .collect();
    for &v in values {
        let k = if width > 0.0 {
            (((v - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        out[k].count += 1;
    }
    Ok(out)
}

/// Formats like C's `%.6g`: six significant digits, trailing zeros removed.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(timestamp: i64, radiation: f64) -> WeatherRecord {
        WeatherRecord {
            timestamp,
            radiation,
            temperature: 50.0,
            pressure: 30.0,
            humidity: 50.0,
            wind_direction: 0.0,
            wind_speed: 1.0,
        }
    }

    #[test]
    fn single_record_month() {
        let s = monthly_stats(&[rec(1_475_150_400, 100.0)]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].year, s[0].month), (2016, 9));
        assert_eq!(s[0].mean_radiation, 100.0);
    }

    #[test]
    fn two_records_average() {
        let s = monthly_stats(&[rec(1_475_150_400, 100.0), rec(1_475_150_700, 300.0)]).unwrap();
        assert_eq!(s[0].mean_radiation, 200.0);
        assert_eq!(s[0].count, 2);
    }

    #[test]
    fn months_are_keyed_and_ordered() {
        // 2016-10-01 00:00:00 UTC and one second before it
        let s = monthly_stats(&[rec(1_475_280_000, 10.0), rec(1_475_279_999, 20.0)]).unwrap();
        assert_eq!(s.iter().map(|m| m.month).collect::<Vec<_>>(), vec![9, 10]);
        assert_eq!(s[0].mean_radiation, 20.0);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(matches!(monthly_stats(&[]), Err(Error::EmptyInput(_))));
        assert!(histogram(&[], 50).is_err());
    }

    #[test]
    fn histogram_counts_sum_and_edges() {
        let values: Vec<f64> = (0..=100).map(f64::from).collect();
        let h = histogram(&values, 50).unwrap();
        assert_eq!(h.len(), 50);
        assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), 101);
        assert_eq!(h[0].low, 0.0);
        assert_eq!(h[49].high, 100.0);
        assert_eq!(h[49].count, 3);
    }

    #[test]
    fn degenerate_histogram_has_one_nonzero_bin() {
        let h = histogram(&[7.0], 50).unwrap();
        assert_eq!(h.iter().filter(|b| b.count > 0).count(), 1);
        assert_eq!(h[0].count, 1);
    }

    #[test]
    fn sig6_matches_printf() {
        // reference strings from Python's "%.6g"
        assert_eq!(format_sig6(222.36), "222.36");
        assert_eq!(format_sig6(222.3649999), "222.365");
        assert_eq!(format_sig6(30.4098765), "30.4099");
        assert_eq!(format_sig6(1234567.0), "1.23457e+06");
        assert_eq!(format_sig6(0.0000123456789), "1.23457e-05");
        assert_eq!(format_sig6(0.000123456789), "0.000123457");
        assert_eq!(format_sig6(-54.1), "-54.1");
        assert_eq!(format_sig6(100.0), "100");
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(999999.7), "1e+06");
    }
}
