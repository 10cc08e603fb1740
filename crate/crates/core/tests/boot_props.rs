mod common;

use modesig_core::boot::{bootstrap_hessian, eigen_rectangles, esp_quantile, upper_quantile};
use modesig_core::{find_modes, DensityModel, MeanShiftOptions};
use proptest::prelude::*;

#[test]
fn bootstrap_spread_tracks_sampling_spread() {
    // Bootstrap sd of lambda_1 at the sample mode vs Monte Carlo sd over
    // fresh datasets.
    let mut rng = common::rng(314);
    let data = common::normal_sample(&mut rng, 500, 1);
    let model = DensityModel::new(data.clone(), 1.0).unwrap();
    let modes = find_modes(&model, &data, &MeanShiftOptions::default()).unwrap();
    let point = modes.candidates[0].location.clone();
    let draws = bootstrap_hessian(&data, 1.0, &point, 1000, 5).unwrap();
    let boot: Vec<f64> = draws.lambda_star.iter().map(|l| l.leading()).collect();
    let boot_sd = common::std_dev(&boot);

    let mc: Vec<f64> = (0..200)
        .map(|_| {
            let fresh = common::normal_sample(&mut rng, 500, 1);
            let m = DensityModel::new(fresh, 1.0).unwrap();
            m.hessian(&point).unwrap().hessian.get(0, 0)
        })
        .collect();
    let mc_sd = common::std_dev(&mc);
    let ratio = boot_sd / mc_sd;
    assert!((0.5..=2.0).contains(&ratio), "boot {boot_sd} mc {mc_sd}");
}

#[test]
fn rectangles_cover_true_curvature() {
    // N(0, I_2) smoothed with h = 1 is N(0, 2 I): Hessian at 0 is -1/(8 pi) I.
    let gamma = 1.0 / (8.0 * std::f64::consts::PI);
    let s_true = [-2.0 * gamma, gamma * gamma];
    let mut per_rect = [0; 2];
    let mut joint = 0;
    let mut ball = 0;
    for rep in 0..100u64 {
        let mut rng = common::rng(9000 + rep);
        let data = common::normal_sample(&mut rng, 400, 2);
        let draws = bootstrap_hessian(&data, 1.0, &[0.0, 0.0], 500, rep).unwrap();
        let cs = esp_quantile(&draws, 0.10).unwrap();
        let r = eigen_rectangles(&draws, &cs);
        for (s, g) in r.gamma.iter().enumerate() {
            per_rect[s] += g.contains(gamma) as u32;
        }
        joint += r.gamma.iter().all(|g| g.contains(gamma)) as u32;
        let sh = draws.s_hat.as_slice();
        let dist = (sh[0] - s_true[0]).abs().max((sh[1] - s_true[1]).abs());
        ball += (dist <= cs.radius) as u32;
    }
    println!("coverage: G1 {} G2 {} joint {joint} esp-ball {ball} of 100", per_rect[0], per_rect[1]);
    assert!(per_rect.iter().all(|&c| c >= 85), "{per_rect:?}");
    assert!(ball >= 85, "ball {ball}");
}

#[test]
fn c_interval_is_first_rectangle_from_same_replicates() {
    let mut rng = common::rng(12);
    let data = common::normal_sample(&mut rng, 120, 3);
    let draws = bootstrap_hessian(&data, 0.8, &[0.0, 0.1, -0.1], 200, 3).unwrap();
    let cs = esp_quantile(&draws, 0.05).unwrap();
    let r = eigen_rectangles(&draws, &cs);
    assert_eq!(r.c_interval, r.gamma[0]);
    for (s, g) in r.gamma.iter().enumerate() {
        let vals: Vec<f64> = r
            .retained
            .iter()
            .map(|&b| -draws.lambda_star[b].as_slice()[s])
            .collect();
        assert_eq!(g.lo, vals.iter().copied().fold(f64::INFINITY, f64::min));
        assert_eq!(g.hi, vals.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }
    for (b, dist) in draws.distances().into_iter().enumerate() {
        assert_eq!(r.retained.contains(&b), dist <= cs.radius);
    }
}

proptest! {
    #[test]
    fn quantile_is_monotone_in_tail(
        values in prop::collection::vec(0.0f64..10.0, 1..200),
        a in 0.001f64..0.999,
        b in 0.001f64..0.999,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(upper_quantile(&values, hi) <= upper_quantile(&values, lo));
    }

    #[test]
    fn quantile_matches_definition(
        values in prop::collection::vec(0u8..20, 1..120),
        tail in 0.001f64..0.999,
    ) {
        let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
        let n = v.len() as f64;
        let brute = v
            .iter()
            .copied()
            .filter(|&z| v.iter().filter(|&&w| w > z).count() as f64 <= tail * n + 1e-9)
            .fold(f64::INFINITY, f64::min);
        prop_assert_eq!(upper_quantile(&v, tail), brute);
    }
}
