//! Deterministic synthetic inputs for integration tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solrad::dataio::{write_csv, Schema, WeatherRecord};

/// 2016-09-01 00:00:00 UTC
pub const SEPT_2016: i64 = 1_472_688_000;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// `y = 3·x1 − 2·x2 + N(0, noise²)` with `x ~ U(-1, 1)²`.
pub fn linear_dataset(n: usize, noise: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect();
    let ys = rows
        .iter()
        .map(|r| 3.0 * r[0] - 2.0 * r[1] + noise * normal(&mut rng))
        .collect();
    (rows, ys)
}

/// HI-SEAS-like log: one reading every `step` seconds for `days` days with a
/// clear-sky bell curve scaled by a per-day cloud factor.
pub fn weather_log(days: usize, step: i64, seed: u64) -> Vec<WeatherRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut wind_dir: f64 = 120.0;
    for d in 0..days {
        let clouds: f64 = rng.gen_range(0.4..1.0);
        let mut t = 0;
        while t < 86_400 {
            let ts = SEPT_2016 + d as i64 * 86_400 + t;
            let hour = t as f64 / 3600.0;
            let sun = ((hour - 6.0) / 12.0 * std::f64::consts::PI).sin().max(0.0);
            let radiation = (1.2 + 1000.0 * sun * clouds * rng.gen_range(0.85..1.0)).max(0.0);
            wind_dir = (wind_dir + 15.0 * normal(&mut rng)).rem_euclid(360.0);
            out.push(WeatherRecord {
                timestamp: ts,
                radiation,
                temperature: 44.0 + 14.0 * sun * clouds + normal(&mut rng),
                pressure: 30.42 + 0.02 * normal(&mut rng),
                humidity: (85.0 - 40.0 * sun * clouds + 5.0 * normal(&mut rng)).clamp(5.0, 100.0),
                wind_direction: wind_dir,
                wind_speed: (5.0 + 2.0 * normal(&mut rng)).abs(),
            });
            t += step;
        }
    }
    out
}

pub fn to_csv(records: &[WeatherRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &Schema::default(), &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}
