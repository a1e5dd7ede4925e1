mod common;

use common::oracles;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solrad::baselines::{
    ewma_backtest, ewma_forecasts, gap_factor, mean_abs_error, wcma_backtest, wcma_predict,
    SlotMatrix,
};

fn random_grid(rng: &mut ChaCha8Rng, days: usize, slots: usize) -> Vec<Vec<f64>> {
    (0..days)
        .map(|_| {
            (0..slots)
                .map(|_| {
                    // sprinkle exact zeros to exercise the neutral-ratio rule
                    if rng.gen_bool(0.15) {
                        0.0
                    } else {
                        rng.gen_range(0.0..1000.0)
                    }
                })
                .collect()
        })
        .collect()
}

#[test]
fn three_by_six_gap_matches_oracle() {
    let grid = vec![
        vec![0.0, 120.0, 480.0, 700.0, 350.0, 20.0],
        vec![0.0, 90.0, 510.0, 640.0, 400.0, 35.0],
        vec![0.0, 60.0, 300.0, 520.0, 410.0, 10.0],
    ];
    let m = SlotMatrix::from_rows(&grid).unwrap();
    for n in 2..6 {
        let got = gap_factor(&m, 2, n, 3).unwrap();
        assert!((got - oracles::gap(&grid, 2, n, 3)).abs() <= 1e-12);
    }
    // hand value for n = 3: ratios 60/105, 300/495, 520/670 weighted 1/3, 2/3, 1
    let hand = (60.0 / 105.0 * (1.0 / 3.0) + 300.0 / 495.0 * (2.0 / 3.0) + 520.0 / 670.0) / 2.0;
    assert!((gap_factor(&m, 2, 3, 3).unwrap() - hand).abs() <= 1e-12);
}

#[test]
fn four_by_eight_wcma_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(48);
    let grid = random_grid(&mut rng, 4, 8);
    let m = SlotMatrix::from_rows(&grid).unwrap();
    for d in 1..4 {
        for n in 2..7 {
            let got = wcma_predict(&m, d, n, 0.3, 3).unwrap();
            let want = oracles::wcma(&grid, d, n, 0.3, 3);
            assert!((got - want).abs() <= 1e-12, "d={d} n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn hundred_random_matrices_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let days = rng.gen_range(2..=6);
        let slots = rng.gen_range(2..=12);
        let grid = random_grid(&mut rng, days, slots);
        let m = SlotMatrix::from_rows(&grid).unwrap();
        let k = rng.gen_range(1..slots);
        let alpha = rng.gen_range(0.0..=1.0);
        for d in 1..days {
            for n in (k - 1)..(slots - 1) {
                let g = gap_factor(&m, d, n, k).unwrap();
                assert!((g - oracles::gap(&grid, d, n, k)).abs() <= 1e-12);
                let w = wcma_predict(&m, d, n, alpha, k).unwrap();
                let want = oracles::wcma(&grid, d, n, alpha, k);
                assert!((w - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }
}

#[test]
fn ewma_thirty_day_constant_trajectory() {
    let c = 512.0;
    let mut grid = vec![vec![0.0; 3]];
    grid.extend(std::iter::repeat_n(vec![c; 3], 30));
    let m = SlotMatrix::from_rows(&grid).unwrap();
    let got = ewma_forecasts(&m, 0.8).unwrap();
    let want = oracles::ewma_trajectory(&grid, 0.8);
    for d in 1..grid.len() {
        for s in 0..3 {
            assert!((got[d - 1][s] - want[d][s]).abs() <= 1e-12);
        }
    }
    // forecast for day 22 has absorbed 21 observations of c
    assert!((got[21][0] - c).abs() < 0.01 * c);
    assert!((got[19][0] - c).abs() > 0.01 * c);
}

#[test]
fn backtest_maes_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grid = random_grid(&mut rng, 4, 24);
    let m = SlotMatrix::from_rows(&grid).unwrap();
    let (e, w) = oracles::baseline_maes(&grid, 0.7, 4);
    let got_e = mean_abs_error(&ewma_backtest(&m, 0.7).unwrap()).unwrap();
    let got_w = mean_abs_error(&wcma_backtest(&m, 0.7, 4, None).unwrap()).unwrap();
    assert!((got_e - e).abs() <= 1e-9);
    assert!((got_w - w).abs() <= 1e-9);
}

#[test]
fn wcma_alpha_endpoints_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let grid = random_grid(&mut rng, 5, 10);
    let m = SlotMatrix::from_rows(&grid).unwrap();
    for n in 2..9 {
        assert_eq!(wcma_predict(&m, 4, n, 1.0, 3).unwrap(), grid[4][n]);
        let mg = oracles::wcma(&grid, 4, n, 0.0, 3);
        assert_eq!(wcma_predict(&m, 4, n, 0.0, 3).unwrap(), mg);
    }
}
