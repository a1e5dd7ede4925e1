//! Moving-average radiation predictors over a day × time-slot grid.
//!
//! Days and slots are 0-based. A slot index `n` refers to the interval
//! `[n · slot_minutes, (n + 1) · slot_minutes)` of a UTC day.

use crate::dataio::WeatherRecord;
use crate::error::{Error, Result};

const MINUTES_PER_DAY: u32 = 1440;

/// Observed mean radiation per (day, slot), row-major by day.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotMatrix {
    days: usize,
    slots: usize,
    values: Vec<f64>,
    filled: Vec<bool>,
    /// UTC day number (days since the epoch) of row 0.
    pub first_day: i64,
    pub slot_minutes: u32,
}

impl SlotMatrix {
    /// Builds a matrix from per-day rows. Every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<SlotMatrix> {
        let days = rows.len();
        let slots = rows.first().map_or(0, Vec::len);
        if days == 0 || slots == 0 {
            return Err(Error::EmptyInput(
                "slot matrix needs at least one day and slot".into(),
            ));
        }
        if let Some(d) = rows.iter().position(|r| r.len() != slots) {
            return Err(Error::Shape(format!(
                "day {d} has {} slots, expected {slots}",
                rows[d].len()
            )));
        }
        let values: Vec<f64> = rows.concat();
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config(
                "slot values must be finite and nonnegative".into(),
            ));
        }
        Ok(SlotMatrix {
            days,
            slots,
            filled: vec![false; values.len()],
            values,
            first_day: 0,
            slot_minutes: MINUTES_PER_DAY / slots as u32,
        })
    }

    pub fn days(&self) -> usize {
        self.days
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn value(&self, day: usize, slot: usize) -> f64 {
        self.values[day * self.slots + slot]
    }

    pub fn day(&self, day: usize) -> &[f64] {
        &self.values[day * self.slots..(day + 1) * self.slots]
    }

    /// True when the cell had no readings and was carried forward.
    pub fn is_filled(&self, day: usize, slot: usize) -> bool {
        self.filled[day * self.slots + slot]
    }

    /// Mean of `slot` over the days before `day`, optionally only the last `cap` of them.
    fn historical_mean(&self, day: usize, slot: usize, cap: Option<usize>) -> f64 {
        let start = cap.map_or(0, |c| day.saturating_sub(c.max(1)));
        let sum: f64 = (start..day).map(|d| self.value(d, slot)).sum();
        sum / (day - start) as f64
    }
}

/// Averages radiation readings into fixed slots of each UTC calendar day.
///
/// Every day between the first and last reading gets a row. A slot with no
/// readings takes the previous slot's value of the same day (0 for slot 0)
/// and is flagged.
pub fn build_slot_matrix(records: &[WeatherRecord], slot_minutes: u32) -> Result<SlotMatrix> {
    if slot_minutes == 0 || !MINUTES_PER_DAY.is_multiple_of(slot_minutes) {
        return Err(Error::Config(format!(
            "slot length {slot_minutes} min does not divide a day"
        )));
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("no records to slot".into()));
    }
    let slots = (MINUTES_PER_DAY / slot_minutes) as usize;
    let slot_seconds = i64::from(slot_minutes) * 60;
    let day_of = |ts: i64| ts.div_euclid(86_400);
    let first_day = records
        .iter()
        .map(|r| day_of(r.timestamp))
        .min()
        .unwrap_or(0);
    let last_day = records
        .iter()
        .map(|r| day_of(r.timestamp))
        .max()
        .unwrap_or(0);
    let days = (last_day - first_day + 1) as usize;

    let mut sums = vec![0.0; days * slots];
    let mut counts = vec![0usize; days * slots];
    for r in records {
        let d = (day_of(r.timestamp) - first_day) as usize;
        let s = (r.timestamp.rem_euclid(86_400) / slot_seconds) as usize;
        sums[d * slots + s] += r.radiation;
        counts[d * slots + s] += 1;
    }
    let mut values = vec![0.0; days * slots];
    let mut filled = vec![false; days * slots];
    for d in 0..days {
        for s in 0..slots {
            let k = d * slots + s;
            if counts[k] > 0 {
                values[k] = sums[k] / counts[k] as f64;
            } else {
                values[k] = if s == 0 { 0.0 } else { values[k - 1] };
                filled[k] = true;
            }
        }
    }
    Ok(SlotMatrix {
        days,
        slots,
        values,
        filled,
        first_day,
        slot_minutes,
    })
}

/// Per-slot estimate for the coming day.
#[derive(Debug, Clone, PartialEq)]
pub struct EwmaState {
    pub estimate: Vec<f64>,
    alpha: f64,
}

impl EwmaState {
    pub fn new(estimate: Vec<f64>, alpha: f64) -> Result<EwmaState> {
        check_alpha(alpha)?;
        Ok(EwmaState { estimate, alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )))
    }
}

/// `E(d, n) = α·E(d−1, n) + (1 − α)·H(d−1, n)` for every slot `n`.
pub fn ewma_step(state: &EwmaState, harvested: &[f64]) -> Result<EwmaState> {
    if harvested.len() != state.estimate.len() {
        return Err(Error::Shape(format!(
            "{} harvested slots for a {}-slot estimate",
            harvested.len(),
            state.estimate.len()
        )));
    }
    let a = state.alpha;
    Ok(EwmaState {
        estimate: state
            .estimate
            .iter()
            .zip(harvested)
            .map(|(e, h)| a * e + (1.0 - a) * h)
            .collect(),
        alpha: a,
    })
}

/// EWMA forecast for every day after the first.
///
/// The estimate is seeded with day 0's observations, so row `k` of the result
/// is the forecast for day `k + 1`.
pub fn ewma_forecasts(matrix: &SlotMatrix, alpha: f64) -> Result<Vec<Vec<f64>>> {
    let mut state = EwmaState::new(matrix.day(0).to_vec(), alpha)?;
    let mut out = Vec::with_capacity(matrix.days().saturating_sub(1));
    for d in 1..matrix.days() {
        out.push(state.estimate.clone());
        state = ewma_step(&state, matrix.day(d))?;
    }
    Ok(out)
}

/// Weighted ratio of today's last `window` slots (ending at `slot`) to their
/// historical means.
///
/// Ratios are weighted `j / window` for `j = 1..=window`, so the newest slot
/// counts most. A slot whose historical mean is zero contributes a ratio of 1.
pub fn gap_factor(matrix: &SlotMatrix, day: usize, slot: usize, window: usize) -> Result<f64> {
    gap_factor_capped(matrix, day, slot, window, None)
}

/// [`gap_factor`] with history limited to the `history_days` most recent days.
pub fn gap_factor_capped(
    matrix: &SlotMatrix,
    day: usize,
    slot: usize,
    window: usize,
    history_days: Option<usize>,
) -> Result<f64> {
    if window == 0 {
        return Err(Error::Config("GAP window must be at least 1".into()));
    }
    if day >= matrix.days() || slot >= matrix.slots() {
        return Err(Error::SlotRange(format!(
            "(day {day}, slot {slot}) outside a {}×{} matrix",
            matrix.days(),
            matrix.slots()
        )));
    }
    if day == 0 {
        return Err(Error::InsufficientHistory(
            "GAP needs at least one prior day".into(),
        ));
    }
    if slot + 1 < window {
        return Err(Error::InsufficientHistory(format!(
            "slot {slot} has fewer than {window} completed slots before it"
        )));
    }
    let first = slot + 1 - window;
    let mut weighted = 0.0;
    let mut weights = 0.0;
    for j in 1..=window {
        let s = first + j - 1;
        let mean = matrix.historical_mean(day, s, history_days);
        let ratio = if mean == 0.0 {
            1.0
        } else {
            matrix.value(day, s) / mean
        };
        let p = j as f64 / window as f64;
        weighted += ratio * p;
        weights += p;
    }
    Ok(weighted / weights)
}

/// Forecast for slot `slot + 1` of `day`, made once `slot` has been observed:
/// `α·observed(day, slot) + (1 − α)·M(day, slot + 1)·GAP(day, slot, window)`,
/// where `M` is the mean of that slot over the prior days.
pub fn wcma_predict(
    matrix: &SlotMatrix,
    day: usize,
    slot: usize,
    alpha: f64,
    window: usize,
) -> Result<f64> {
    wcma_predict_capped(matrix, day, slot, alpha, window, None)
}

pub fn wcma_predict_capped(
    matrix: &SlotMatrix,
    day: usize,
    slot: usize,
    alpha: f64,
    window: usize,
    history_days: Option<usize>,
) -> Result<f64> {
    check_alpha(alpha)?;
    if slot + 1 >= matrix.slots() {
        return Err(Error::SlotRange(format!(
            "slot {} does not exist in a {}-slot day",
            slot + 1,
            matrix.slots()
        )));
    }
    let gap = gap_factor_capped(matrix, day, slot, window, history_days)?;
    let m = matrix.historical_mean(day, slot + 1, history_days);
    Ok(alpha * matrix.value(day, slot) + (1.0 - alpha) * m * gap)
}

/// One baseline forecast next to the value it tried to predict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotForecast {
    pub day: usize,
    pub slot: usize,
    pub observed: f64,
    pub predicted: f64,
}

impl SlotForecast {
    pub fn abs_error(&self) -> f64 {
        (self.observed - self.predicted).abs()
    }
}

/// EWMA forecasts for every slot of days `1..D`.
pub fn ewma_backtest(matrix: &SlotMatrix, alpha: f64) -> Result<Vec<SlotForecast>> {
    let forecasts = ewma_forecasts(matrix, alpha)?;
    Ok(forecasts
        .iter()
        .enumerate()
        .flat_map(|(k, row)| {
            let day = k + 1;
            row.iter()
                .enumerate()
                .map(move |(slot, &predicted)| SlotForecast {
                    day,
                    slot,
                    observed: matrix.value(day, slot),
                    predicted,
                })
        })
        .collect())
}

/// WCMA forecasts for every (day ≥ 1, slot) that has enough history; the
/// `slot` field names the predicted slot.
pub fn wcma_backtest(
    matrix: &SlotMatrix,
    alpha: f64,
    window: usize,
    history_days: Option<usize>,
) -> Result<Vec<SlotForecast>> {
    check_alpha(alpha)?;
    if window == 0 {
        return Err(Error::Config("GAP window must be at least 1".into()));
    }
    let mut out = Vec::new();
    for day in 1..matrix.days() {
        for slot in window.saturating_sub(1)..matrix.slots().saturating_sub(1) {
            let predicted = wcma_predict_capped(matrix, day, slot, alpha, window, history_days)?;
            out.push(SlotForecast {
                day,
                slot: slot + 1,
                observed: matrix.value(day, slot + 1),
                predicted,
            });
        }
    }
    Ok(out)
}

pub fn mean_abs_error(forecasts: &[SlotForecast]) -> Option<f64> {
    if forecasts.is_empty() {
        return None;
    }
    Some(forecasts.iter().map(SlotForecast::abs_error).sum::<f64>() / forecasts.len() as f64)
}
