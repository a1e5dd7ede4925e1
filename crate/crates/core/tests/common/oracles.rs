//! Straight-line reference implementations, written without the crate's
//! internals so they can check it.

#![allow(clippy::needless_range_loop)]

use solrad::network::{forward, loss, Activation, LossKind, NetworkConfig, NetworkParams};

/// Dense chain evaluated with explicit index loops over the flat payload
/// (layer by layer, weights row-major then biases).
pub fn chain_forward(config: &NetworkConfig, flat: &[f64], x: &[f64]) -> f64 {
    let mut input: Vec<f64> = x.to_vec();
    let mut offset = 0;
    let mut fan_in = config.input_dim;
    for spec in &config.layers {
        let units = spec.units;
        let w = &flat[offset..offset + units * fan_in];
        let b = &flat[offset + units * fan_in..offset + units * fan_in + units];
        offset += units * (fan_in + 1);
        let mut out = vec![0.0; units];
        for i in 0..units {
            let mut z = b[i];
            for j in 0..fan_in {
                z += w[i * fan_in + j] * input[j];
            }
            out[i] = match spec.activation {
                Activation::Relu => {
                    if z > 0.0 {
                        z
                    } else {
                        0.0
                    }
                }
                Activation::Linear => z,
            };
        }
        input = out;
        fan_in = units;
    }
    input[0]
}

/// Single-sample loss (data term plus ridge) as a function of the flat parameters.
pub fn sample_loss(config: &NetworkConfig, flat: &[f64], x: &[f64], y: f64, kind: LossKind) -> f64 {
    let params = NetworkParams::from_flat(config, flat).unwrap();
    let (pred, _) = forward(config, &params, x).unwrap();
    loss(&[pred], &[y], kind, &params, config).unwrap()
}

/// Central finite differences of [`sample_loss`] for every coordinate.
pub fn fd_gradient(
    config: &NetworkConfig,
    flat: &[f64],
    x: &[f64],
    y: f64,
    kind: LossKind,
    h: f64,
) -> Vec<f64> {
    let mut probe = flat.to_vec();
    (0..flat.len())
        .map(|k| {
            let orig = probe[k];
            probe[k] = orig + h;
            let up = sample_loss(config, &probe, x, y, kind);
            probe[k] = orig - h;
            let down = sample_loss(config, &probe, x, y, kind);
            probe[k] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Adam with bias correction on one scalar, constant gradient `g`.
pub fn scalar_adam(w0: f64, g: f64, steps: usize, lr: f64) -> (f64, f64, f64) {
    let (b1, b2, eps) = (0.9f64, 0.999f64, 1e-8f64);
    let (mut w, mut m, mut v) = (w0, 0.0f64, 0.0f64);
    for t in 1..=steps {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        let mh = m / (1.0 - b1.powi(t as i32));
        let vh = v / (1.0 - b2.powi(t as i32));
        w -= lr * mh / (vh.sqrt() + eps);
    }
    (w, m, v)
}

/// Mean of column `slot` over rows `0..day`.
fn prior_mean(grid: &[Vec<f64>], day: usize, slot: usize) -> f64 {
    let mut s = 0.0;
    for d in 0..day {
        s += grid[d][slot];
    }
    s / day as f64
}

/// GAP over the `k` slots ending at `n` (0-based), weights j/k.
pub fn gap(grid: &[Vec<f64>], d: usize, n: usize, k: usize) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 1..=k {
        let slot = n + j - k;
        let mean = prior_mean(grid, d, slot);
        let v = if mean == 0.0 {
            1.0
        } else {
            grid[d][slot] / mean
        };
        let p = j as f64 / k as f64;
        num += v * p;
        den += p;
    }
    num / den
}

pub fn wcma(grid: &[Vec<f64>], d: usize, n: usize, alpha: f64, k: usize) -> f64 {
    alpha * grid[d][n] + (1.0 - alpha) * prior_mean(grid, d, n + 1) * gap(grid, d, n, k)
}

/// Per-day EWMA forecasts seeded with day 0: entry `d` forecasts day `d`.
pub fn ewma_trajectory(grid: &[Vec<f64>], alpha: f64) -> Vec<Vec<f64>> {
    let mut est = grid[0].clone();
    let mut out = vec![Vec::new()];
    for d in 1..grid.len() {
        out.push(est.clone());
        for s in 0..est.len() {
            est[s] = alpha * est[s] + (1.0 - alpha) * grid[d][s];
        }
    }
    out
}

/// Mean absolute error of EWMA and WCMA over every predictable cell.
pub fn baseline_maes(grid: &[Vec<f64>], alpha: f64, k: usize) -> (f64, f64) {
    let traj = ewma_trajectory(grid, alpha);
    let (mut e_sum, mut e_n) = (0.0, 0usize);
    for d in 1..grid.len() {
        for s in 0..grid[d].len() {
            e_sum += (grid[d][s] - traj[d][s]).abs();
            e_n += 1;
        }
    }
    let (mut w_sum, mut w_n) = (0.0, 0usize);
    for d in 1..grid.len() {
        for n in (k - 1)..(grid[d].len() - 1) {
            w_sum += (grid[d][n + 1] - wcma(grid, d, n, alpha, k)).abs();
            w_n += 1;
        }
    }
    (e_sum / e_n as f64, w_sum / w_n as f64)
}
