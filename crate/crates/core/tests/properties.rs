//! Property tests for the algebraic invariants of the statistics, the
//! generators and the K estimator.

use chaos01::hrv::segment_series;
use chaos01::ktest::{correlation_k, mean_square_displacement, translation_vars};
use chaos01::maps::{fold, generate, MapKind, MapSpec, NoiseKind, NoiseSpec};
use chaos01::noise::estimate_sigma;
use chaos01::series::{mad, median, range_of, summary_stats};
use chaos01::{Series, TestConfig};
use proptest::prelude::*;

fn finite_values(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn summary_stats_is_permutation_invariant(
        values in finite_values(1..40),
        seed in any::<u64>(),
    ) {
        let base = summary_stats(&values, 0.9).unwrap();
        let mut shuffled = values.clone();
        // Deterministic Fisher-Yates from the seed.
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        let perm = summary_stats(&shuffled, 0.9).unwrap();
        prop_assert_eq!(base, perm);
    }

    #[test]
    fn median_and_mad_shift_invariance(values in finite_values(1..40), shift in -50.0..50.0f64) {
        let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
        prop_assert!((median(&shifted) - (median(&values) + shift)).abs() < 1e-9);
        prop_assert!((mad(&shifted) - mad(&values)).abs() < 1e-9);
    }

    #[test]
    fn range_scales_with_absolute_factor(values in finite_values(1..40), a in -10.0..10.0f64) {
        let series = Series::unitless(values.clone()).unwrap();
        let scaled = Series::unitless(values.iter().map(|v| a * v).collect()).unwrap();
        let expected = a.abs() * range_of(&series);
        prop_assert!((range_of(&scaled) - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    #[test]
    fn fold_lands_in_unit_interval(y in -1e6..1e6f64) {
        let f = fold(y);
        prop_assert!((0.0..1.0).contains(&f), "fold({y}) = {f}");
    }

    #[test]
    fn generation_prefix_property(
        seed in any::<u64>(),
        x0 in 0.01..0.99f64,
        dynamical in any::<bool>(),
    ) {
        let spec = MapSpec { kind: MapKind::Logistic, param: 3.97 };
        let kind = if dynamical { NoiseKind::Dynamical } else { NoiseKind::Output };
        let noise = NoiseSpec::new(kind, 0.03, seed).unwrap();
        let full = generate(&spec, &noise, x0, 120).unwrap();
        let prefix = generate(&spec, &noise, x0, 45).unwrap();
        prop_assert_eq!(&full.samples()[..45], prefix.samples());
    }

    #[test]
    fn dynamical_noise_stays_in_unit_interval(seed in any::<u64>(), sigma in 0.0..0.5f64) {
        let spec = MapSpec { kind: MapKind::PomeauManneville, param: 0.2 };
        let noise = NoiseSpec::new(NoiseKind::Dynamical, sigma, seed).unwrap();
        let series = generate(&spec, &noise, 0.4, 300).unwrap();
        prop_assert!(series.samples().iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn estimate_sigma_scale_and_shift(values in finite_values(3..60), a in 0.1..5.0f64, t in -10.0..10.0f64) {
        let series = Series::unitless(values.clone()).unwrap();
        let base = estimate_sigma(&series).unwrap();
        let transformed =
            Series::unitless(values.iter().map(|v| a * v + t).collect()).unwrap();
        let got = estimate_sigma(&transformed).unwrap();
        prop_assert!((got - a * base).abs() <= 1e-9 * (a * base).max(1.0));
    }

    #[test]
    fn correlation_is_bounded_and_affine_invariant(
        profile in prop::collection::vec(-1e3..1e3f64, 3..60),
        scale in 0.01..100.0f64,
        offset in -1e3..1e3f64,
    ) {
        if let Ok(k) = correlation_k(&profile) {
            prop_assert!((-1.0..=1.0).contains(&k));
            let transformed: Vec<f64> = profile.iter().map(|d| scale * d + offset).collect();
            if let Ok(k2) = correlation_k(&transformed) {
                prop_assert!((k - k2).abs() < 1e-6, "K changed under affine map: {k} vs {k2}");
            }
        }
    }

    #[test]
    fn segment_windows_partition_correctly(n in 3usize..400, window in 3usize..80, shift in 1usize..40) {
        let series = Series::unitless((0..n).map(|i| i as f64).collect()).unwrap();
        let windows = segment_series(&series, window, shift).unwrap();
        // First window starts at 0, last ends at n, all full width.
        prop_assert_eq!(windows.first().unwrap().0, 0);
        let (last_start, last) = windows.last().unwrap();
        prop_assert_eq!(last_start + last.len(), n);
        for (start, w) in &windows {
            prop_assert_eq!(w.len(), window.min(n));
            prop_assert_eq!(w.samples(), &series.samples()[*start..start + w.len()]);
        }
        for pair in windows.windows(2) {
            prop_assert!(pair[1].0 - pair[0].0 <= shift);
        }
    }
}

#[test]
fn k_statistic_bounds_on_random_series() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let samples: Vec<f64> = (0..400).map(|_| rng.gen_range(-1.0..2.0)).collect();
        let series = Series::unitless(samples).unwrap();
        let cfg = TestConfig {
            sigma: Some(0.05),
            ..TestConfig::default()
        };
        let result = chaos01::k_statistic(&series, &cfg).unwrap();
        assert!((-1.0..=1.0).contains(&result.k));
        assert!(result.k_per_c.iter().all(|k| (-1.0..=1.0).contains(k)));
    }
}

/// Boundedness proxy for regular dynamics: the displacement profile of the
/// noise-free period-4 logistic orbit never exceeds 100x its median.
#[test]
fn regular_msd_profile_is_bounded() {
    let spec = MapSpec {
        kind: MapKind::Logistic,
        param: 3.5,
    };
    let series = generate(&spec, &NoiseSpec::none(), 0.37, 10_000).unwrap();
    for c in [0.7, 1.3, 2.4, 4.0, 5.5] {
        let traj = translation_vars(&series, c).unwrap();
        let m = mean_square_displacement(&traj, 1000).unwrap();
        let max = m.iter().copied().fold(0.0, f64::max);
        let med = median(&m);
        assert!(
            max <= 100.0 * med,
            "M profile unbounded at c = {c}: max {max}, median {med}"
        );
    }
}
