mod common;

use std::f64::consts::FRAC_1_SQRT_2;

use common::oracles::{chain_forward, fd_gradient, scalar_adam};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solrad::network::{backward, forward, init_params, LossKind, NetworkConfig};
use solrad::optim::{adam_step, AdamHyper, AdamState};

fn random_input(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..8).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

/// Worst `|analytic − numeric| / max(1, |analytic|)` over all coordinates.
fn worst_relative_error(seed: u64, kind: LossKind) -> f64 {
    let config = NetworkConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let params = init_params(&config, seed);
    let x = random_input(&mut rng);
    let (pred, acts) = forward(&config, &params, &x).unwrap();
    // keep the MAE residual well away from its kink
    let offset = rng.gen_range(0.5..1.5) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let y = pred + offset;

    let analytic = backward(&config, &params, &acts, &x, y, kind).to_flat();
    let numeric = fd_gradient(&config, &params.to_flat(), &x, y, kind, 1e-5);
    analytic
        .iter()
        .zip(&numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max)
}

#[test]
fn default_net_gradient_matches_finite_differences() {
    let err = worst_relative_error(42, LossKind::Mse);
    assert!(err < 1e-6, "max relative error {err:e}");
}

#[test]
fn twenty_randomized_gradient_checks() {
    for case in 0..20u64 {
        let kind = if case % 2 == 0 {
            LossKind::Mse
        } else {
            LossKind::Mae
        };
        let err = worst_relative_error(1000 + case, kind);
        assert!(err < 1e-5, "case {case} ({kind}): {err:e}");
    }
}

#[test]
fn forward_matches_straight_line_chain() {
    let config = NetworkConfig::default();
    let params = init_params(&config, 42);
    let x = [
        48.0,
        59.0,
        30.46,
        5.62,
        0.0458,
        -0.9990,
        FRAC_1_SQRT_2,
        -FRAC_1_SQRT_2,
    ];
    let (pred, _) = forward(&config, &params, &x).unwrap();
    let expected = chain_forward(&config, &params.to_flat(), &x);
    assert!((pred - expected).abs() <= 1e-12, "{pred} vs {expected}");

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for seed in 0..25 {
        let params = init_params(&config, seed);
        let x = random_input(&mut rng);
        let (pred, _) = forward(&config, &params, &x).unwrap();
        assert!((pred - chain_forward(&config, &params.to_flat(), &x)).abs() <= 1e-12);
    }
}

fn scalar_net() -> (NetworkConfig, solrad::network::NetworkParams) {
    let config = NetworkConfig::from_hidden(1, &[], 0.0);
    let mut p = solrad::network::NetworkParams::zeros(&config);
    p.layers[0].weights[0] = 1.0;
    (config, p)
}

#[test]
fn adam_two_steps_match_scalar_recurrence() {
    let (_, p0) = scalar_net();
    let mut g = p0.zeros_like();
    g.layers[0].weights[0] = 1.0;
    let h = AdamHyper::default();

    let (p1, s1) = adam_step(&p0, &g, &AdamState::new(&p0), &h, 0.001).unwrap();
    let (w1, m1, v1) = scalar_adam(1.0, 1.0, 1, 0.001);
    assert!((p1.layers[0].weights[0] - w1).abs() <= 1e-15);
    assert!((s1.m.layers[0].weights[0] - m1).abs() <= 1e-15);
    assert!((s1.v.layers[0].weights[0] - v1).abs() <= 1e-15);
    assert!((w1 - (1.0 - 0.001 / (1.0 + 1e-8))).abs() <= 1e-15);

    let (p2, s2) = adam_step(&p1, &g, &s1, &h, 0.001).unwrap();
    let (w2, m2, v2) = scalar_adam(1.0, 1.0, 2, 0.001);
    assert!((p2.layers[0].weights[0] - w2).abs() <= 1e-15);
    assert!((s2.m.layers[0].weights[0] - m2).abs() <= 1e-15);
    assert!((s2.v.layers[0].weights[0] - v2).abs() <= 1e-15);
    assert_eq!(s2.t, 2);
}
