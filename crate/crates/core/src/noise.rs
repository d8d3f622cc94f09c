//! Dynamical-noise standard deviation estimation.
//!
//! The default estimator is the second-difference estimator
//! `sigma^2 = E[(x(i+2) - 2 x(i+1) + x(i))^2] / 6`, which is exact on white
//! noise and insensitive to smooth trends (second differences of constants
//! and linear ramps vanish). It stands in for an external closed-form
//! method; any `Series -> sigma` function may be substituted downstream,
//! and every consumer also accepts an externally supplied sigma.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hrv::segment_series;
use crate::series::Series;

/// Estimated noise standard deviation, optionally with the per-window
/// values it was averaged from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaEstimate {
    pub sigma: f64,
    /// `(window_start_index, sigma)` pairs; start indices are 0-based.
    pub per_window: Option<Vec<(usize, f64)>>,
}

/// Second-difference white-noise estimator of sigma.
pub fn estimate_sigma(series: &Series) -> Result<f64> {
    let x = series.samples();
    let n = x.len();
    if n < 3 {
        return Err(Error::TooShort { needed: 3, got: n });
    }
    let sum_sq: f64 = x
        .windows(3)
        .map(|w| {
            let d = w[2] - 2.0 * w[1] + w[0];
            d * d
        })
        .sum();
    Ok((sum_sq / (6.0 * (n - 2) as f64)).sqrt())
}

/// Windowed sigma: estimate per segment and average.
///
/// Windows follow [`segment_series`]: width `window`, start shifted by
/// `shift`, with a final window forced to end at the last sample.
pub fn windowed_sigma(series: &Series, window: usize, shift: usize) -> Result<SigmaEstimate> {
    let segments = segment_series(series, window, shift)?;
    let mut per_window = Vec::with_capacity(segments.len());
    for (start, segment) in &segments {
        per_window.push((*start, estimate_sigma(segment)?));
    }
    let sigma = per_window.iter().map(|(_, s)| s).sum::<f64>() / per_window.len() as f64;
    Ok(SigmaEstimate {
        sigma,
        per_window: Some(per_window),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn white_noise(sigma: f64, n: usize, seed: u64) -> Series {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma).unwrap();
        Series::unitless((0..n).map(|_| normal.sample(&mut rng)).collect()).unwrap()
    }

    #[test]
    fn vanishes_on_constant_and_linear_series() {
        let constant = Series::unitless(vec![2.5; 50]).unwrap();
        assert_eq!(estimate_sigma(&constant).unwrap(), 0.0);
        let ramp = Series::unitless((1..=5).map(|i| i as f64).collect()).unwrap();
        assert_eq!(estimate_sigma(&ramp).unwrap(), 0.0);
    }

    #[test]
    fn too_short_below_three_samples() {
        let s = Series::unitless(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            estimate_sigma(&s),
            Err(Error::TooShort { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn recovers_white_noise_sigma() {
        // Monte Carlo over seeds; E[(second difference)^2] = 6 sigma^2.
        let sigma = 0.05;
        let mut hits = 0;
        for seed in 0..100 {
            let est = estimate_sigma(&white_noise(sigma, 10_000, seed)).unwrap();
            if (est - sigma).abs() <= 0.05 * sigma {
                hits += 1;
            }
        }
        assert!(hits >= 95, "only {hits}/100 within 5%");
    }

    #[test]
    fn scale_and_shift_behavior() {
        let noise = white_noise(0.1, 500, 42);
        let base = estimate_sigma(&noise).unwrap();
        let scaled =
            Series::unitless(noise.samples().iter().map(|x| -3.0 * x).collect()).unwrap();
        assert!((estimate_sigma(&scaled).unwrap() - 3.0 * base).abs() < 1e-12);
        let shifted =
            Series::unitless(noise.samples().iter().map(|x| x + 10.0).collect()).unwrap();
        assert!((estimate_sigma(&shifted).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn slow_sinusoid_bias_is_small() {
        // Signal period 100 samples, amplitude 10 sigma: bias must stay
        // under 5%.
        let sigma = 0.01;
        let noise = white_noise(sigma, 10_000, 7);
        let samples: Vec<f64> = noise
            .samples()
            .iter()
            .enumerate()
            .map(|(j, &e)| 10.0 * sigma * (2.0 * std::f64::consts::PI * j as f64 / 100.0).sin() + e)
            .collect();
        let est = estimate_sigma(&Series::unitless(samples).unwrap()).unwrap();
        assert!(
            (est - sigma).abs() / sigma < 0.05,
            "estimate {est} deviates more than 5% from {sigma}"
        );
    }

    #[test]
    fn windowed_sigma_layout_n10000() {
        let series = white_noise(0.1, 10_000, 3);
        let est = windowed_sigma(&series, 5000, 2500).unwrap();
        let per_window = est.per_window.unwrap();
        let starts: Vec<usize> = per_window.iter().map(|(s, _)| *s).collect();
        assert_eq!(starts, vec![0, 2500, 5000]);
        let mean = per_window.iter().map(|(_, s)| s).sum::<f64>() / 3.0;
        assert!((est.sigma - mean).abs() < 1e-15);
    }

    #[test]
    fn windowed_sigma_single_window_equals_whole_series() {
        let series = white_noise(0.1, 5000, 4);
        let est = windowed_sigma(&series, 5000, 2500).unwrap();
        assert_eq!(est.per_window.as_ref().unwrap().len(), 1);
        assert_eq!(est.sigma, estimate_sigma(&series).unwrap());
    }

    #[test]
    fn windowed_sigma_recovers_noise_level() {
        let sigma = 0.1;
        let series = white_noise(sigma, 12_500, 11);
        let est = windowed_sigma(&series, 5000, 2500).unwrap();
        for (_, s) in est.per_window.as_ref().unwrap() {
            assert!((s - sigma).abs() / sigma < 0.10);
        }
        assert!((est.sigma - sigma).abs() / sigma < 0.05);
    }
}
