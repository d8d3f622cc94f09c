//! Synthetic map ensembles: logistic and Pomeau-Manneville series under
//! dynamical or output noise.
//!
//! Reproducibility contract: Gaussian noise is drawn from a
//! `ChaCha8Rng` seeded with `NoiseSpec::seed` via `seed_from_u64` (stream 0),
//! one draw per perturbed sample in series order. Random initial
//! conditions (see [`crate::bench`]) use stream 1 of the same generator, so
//! the two streams never alias. Ensemble runs derive per-realization seeds
//! as `seed_base + realization_index`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{range_of, Series, Unit};

/// Map family selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Logistic,
    PomeauManneville,
}

/// A one-dimensional interval map on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub kind: MapKind,
    /// mu in [0, 4] for the logistic map, gamma > 0 for Pomeau-Manneville.
    pub param: f64,
}

impl MapSpec {
    pub fn logistic(mu: f64) -> Result<Self> {
        if !(0.0..=4.0).contains(&mu) {
            return Err(Error::DomainError(format!(
                "logistic parameter mu = {mu} outside [0, 4]"
            )));
        }
        Ok(Self {
            kind: MapKind::Logistic,
            param: mu,
        })
    }

    pub fn pomeau_manneville(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::DomainError(format!(
                "Pomeau-Manneville parameter gamma = {gamma} must be > 0"
            )));
        }
        Ok(Self {
            kind: MapKind::PomeauManneville,
            param: gamma,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            MapKind::Logistic => Self::logistic(self.param).map(|_| ()),
            MapKind::PomeauManneville => Self::pomeau_manneville(self.param).map(|_| ()),
        }
    }

    /// Short label for table rows, e.g. `logistic(mu=3.97)`.
    pub fn label(&self) -> String {
        match self.kind {
            MapKind::Logistic => format!("logistic(mu={})", self.param),
            MapKind::PomeauManneville => format!("pm(gamma={})", self.param),
        }
    }
}

/// Kind of stochastic perturbation applied to a map orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// No perturbation.
    None,
    /// Noise injected inside the recursion; samples are folded back into
    /// [0, 1) after each step.
    Dynamical,
    /// Noise added to the finished noise-free series; samples may leave
    /// [0, 1].
    Output,
}

/// Gaussian noise specification with an absolute standard deviation and
/// an optional record of the percentage it was calibrated from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Absolute standard deviation, >= 0.
    pub sigma: f64,
    /// Percentage of the noise-free range that `sigma` was derived from,
    /// when applicable.
    pub pct: Option<f64>,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self {
            kind: NoiseKind::None,
            sigma: 0.0,
            pct: None,
            seed: 0,
        }
    }

    pub fn new(kind: NoiseKind, sigma: f64, seed: u64) -> Result<Self> {
        let spec = Self {
            kind,
            sigma,
            pct: None,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) {
            return Err(Error::DomainError(format!(
                "noise sigma = {} must be >= 0",
                self.sigma
            )));
        }
        if self.kind == NoiseKind::None && self.sigma != 0.0 {
            return Err(Error::DomainError(
                "noise kind `none` requires sigma = 0".into(),
            ));
        }
        Ok(())
    }
}

/// Reduction modulo 1 into [0, 1): `y - floor(y)`, so -0.1 maps to 0.9.
///
/// Guards against the rounding case where `y - floor(y)` evaluates to
/// exactly 1.0 for tiny negative `y`.
pub fn fold(y: f64) -> f64 {
    let f = y - y.floor();
    if f >= 1.0 {
        f - 1.0
    } else {
        f
    }
}

/// One noise-free application of the map.
///
/// Logistic: `mu * x * (1 - x)`. Pomeau-Manneville: `x + x^(gamma+1)`
/// reduced modulo 1.
pub fn map_step(spec: &MapSpec, x: f64) -> Result<f64> {
    spec.validate()?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::DomainError(format!(
            "map state x = {x} outside [0, 1]"
        )));
    }
    Ok(match spec.kind {
        MapKind::Logistic => spec.param * x * (1.0 - x),
        MapKind::PomeauManneville => fold(x + x.powf(spec.param + 1.0)),
    })
}

/// Noise standard deviation as `pct` percent of the range of the
/// noise-free orbit of length `n` started at `x0`.
pub fn calibrate_sigma(spec: &MapSpec, x0: f64, n: usize, pct: f64) -> Result<f64> {
    if !(pct >= 0.0) {
        return Err(Error::DomainError(format!("pct = {pct} must be >= 0")));
    }
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let noise_free = generate(spec, &NoiseSpec::none(), x0, n)?;
    Ok(pct / 100.0 * range_of(&noise_free))
}

/// Generate a length-`n` orbit starting at `x0`, perturbed according to
/// `noise`. The initial condition is emitted as the first sample.
///
/// Dynamical noise perturbs each step and folds the result back into
/// [0, 1); output noise is added samplewise to the finished noise-free
/// orbit without folding.
pub fn generate(spec: &MapSpec, noise: &NoiseSpec, x0: f64, n: usize) -> Result<Series> {
    spec.validate()?;
    noise.validate()?;
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::DomainError(format!(
            "initial condition x0 = {x0} outside [0, 1]"
        )));
    }
    if n < 1 {
        return Err(Error::EmptyInput);
    }

    let mut samples = Vec::with_capacity(n);
    samples.push(x0);

    match noise.kind {
        NoiseKind::None => {
            let mut x = x0;
            for _ in 1..n {
                x = map_step(spec, x)?;
                samples.push(x);
            }
        }
        NoiseKind::Dynamical => {
            let mut draws = gaussian_draws(noise);
            let mut x = x0;
            for _ in 1..n {
                x = fold(map_step(spec, x)? + draws.next());
                samples.push(x);
            }
        }
        NoiseKind::Output => {
            let mut x = x0;
            for _ in 1..n {
                x = map_step(spec, x)?;
                samples.push(x);
            }
            let mut draws = gaussian_draws(noise);
            for sample in samples.iter_mut() {
                *sample += draws.next();
            }
        }
    }

    Series::new(samples, Unit::Unitless)
}

/// Uniform draw in the open interval (0, 1) from stream 1 of the seeded
/// generator; used for random initial conditions so the draw never
/// collides with the noise stream of the same seed.
pub fn random_x0(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng.sample(rand::distributions::Open01)
}

struct GaussianStream {
    rng: ChaCha8Rng,
    normal: Normal<f64>,
}

impl GaussianStream {
    fn next(&mut self) -> f64 {
        self.normal.sample(&mut self.rng)
    }
}

fn gaussian_draws(noise: &NoiseSpec) -> GaussianStream {
    GaussianStream {
        rng: ChaCha8Rng::seed_from_u64(noise.seed),
        // sigma >= 0 validated upstream; sigma = 0 yields a constant 0 draw
        normal: Normal::new(0.0, noise.sigma).expect("validated sigma"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_step_example() {
        let spec = MapSpec::logistic(3.97).unwrap();
        assert_eq!(map_step(&spec, 0.5).unwrap(), 0.9925);
    }

    #[test]
    fn pm_step_without_fold() {
        let spec = MapSpec::pomeau_manneville(0.2).unwrap();
        let expected = 0.5 + 0.5f64.powf(1.2);
        let got = map_step(&spec, 0.5).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.935275).abs() < 1e-6);
    }

    #[test]
    fn pm_step_folds_above_one() {
        let spec = MapSpec::pomeau_manneville(0.2).unwrap();
        let raw = 0.999 + 0.999f64.powf(1.2);
        assert!(raw > 1.0);
        let got = map_step(&spec, 0.999).unwrap();
        assert!((got - (raw - 1.0)).abs() < 1e-15);
        assert!((got - 0.99780).abs() < 1e-4);
    }

    #[test]
    fn map_step_rejects_out_of_range_state() {
        let spec = MapSpec::logistic(3.5).unwrap();
        assert!(matches!(
            map_step(&spec, 1.5),
            Err(Error::DomainError(_))
        ));
        assert!(matches!(
            map_step(&spec, -0.1),
            Err(Error::DomainError(_))
        ));
    }

    #[test]
    fn fold_maps_negatives_into_unit_interval() {
        assert!((fold(-0.1) - 0.9).abs() < 1e-15);
        assert_eq!(fold(0.25), 0.25);
        assert_eq!(fold(2.0), 0.0);
        // Rounding guard: 1 - 1e-17 rounds to 1.0 in f64.
        let folded = fold(-1e-17);
        assert!((0.0..1.0).contains(&folded));
    }

    #[test]
    fn noise_free_generation_matches_direct_iteration() {
        let spec = MapSpec::logistic(3.97).unwrap();
        let series = generate(&spec, &NoiseSpec::none(), 0.5, 3).unwrap();
        let expected = [0.5, 0.9925, 3.97 * 0.9925 * (1.0 - 0.9925)];
        for (got, want) in series.samples().iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!((series.samples()[2] - 0.0295517).abs() < 1e-7);
    }

    #[test]
    fn zero_sigma_dynamical_equals_noise_free() {
        let spec = MapSpec::pomeau_manneville(0.2).unwrap();
        let clean = generate(&spec, &NoiseSpec::none(), 0.37, 200).unwrap();
        let noisy = generate(
            &spec,
            &NoiseSpec::new(NoiseKind::Dynamical, 0.0, 7).unwrap(),
            0.37,
            200,
        )
        .unwrap();
        assert_eq!(clean.samples(), noisy.samples());
    }

    #[test]
    fn dynamical_samples_stay_in_unit_interval() {
        let spec = MapSpec::logistic(3.5).unwrap();
        let noise = NoiseSpec::new(NoiseKind::Dynamical, 0.3, 11).unwrap();
        let series = generate(&spec, &noise, 0.5, 5000).unwrap();
        assert!(series
            .samples()
            .iter()
            .all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn output_noise_may_leave_unit_interval() {
        let spec = MapSpec::logistic(3.97).unwrap();
        let noise = NoiseSpec::new(NoiseKind::Output, 0.2, 3).unwrap();
        let series = generate(&spec, &noise, 0.5, 5000).unwrap();
        assert!(series
            .samples()
            .iter()
            .any(|&x| !(0.0..=1.0).contains(&x)));
    }

    #[test]
    fn generation_is_reproducible_and_prefix_stable() {
        let spec = MapSpec::logistic(3.97).unwrap();
        for kind in [NoiseKind::Dynamical, NoiseKind::Output] {
            let noise = NoiseSpec::new(kind, 0.05, 99).unwrap();
            let a = generate(&spec, &noise, 0.5, 400).unwrap();
            let b = generate(&spec, &noise, 0.5, 400).unwrap();
            assert_eq!(a.samples(), b.samples());
            let prefix = generate(&spec, &noise, 0.5, 150).unwrap();
            assert_eq!(&a.samples()[..150], prefix.samples());
        }
    }

    #[test]
    fn regular_logistic_tail_is_period_four() {
        let spec = MapSpec::logistic(3.5).unwrap();
        let series = generate(&spec, &NoiseSpec::none(), 0.5, 10_000).unwrap();
        let tail = &series.samples()[9000..];
        let mut distinct: Vec<f64> = Vec::new();
        for &x in tail {
            if !distinct.iter().any(|&d| (d - x).abs() < 1e-9) {
                distinct.push(x);
            }
        }
        assert_eq!(distinct.len(), 4, "tail values: {distinct:?}");
    }

    #[test]
    fn calibrate_sigma_examples() {
        let spec = MapSpec::logistic(3.97).unwrap();
        let sigma = calibrate_sigma(&spec, 0.5, 10_000, 5.0).unwrap();
        // Range of the chaotic orbit from x0 = 0.5 is about 0.9630.
        assert!((sigma - 0.04815).abs() < 2e-4, "sigma = {sigma}");
        assert_eq!(calibrate_sigma(&spec, 0.5, 10_000, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn calibrate_sigma_regular_uses_attractor_range() {
        let spec = MapSpec::logistic(3.5).unwrap();
        let series = generate(&spec, &NoiseSpec::none(), 0.5, 10_000).unwrap();
        let expected = 0.2 * crate::series::range_of(&series);
        let sigma = calibrate_sigma(&spec, 0.5, 10_000, 20.0).unwrap();
        assert!((sigma - expected).abs() < 1e-15);
    }

    #[test]
    fn random_x0_is_deterministic_and_open() {
        let a = random_x0(5);
        let b = random_x0(5);
        assert_eq!(a, b);
        assert!(a > 0.0 && a < 1.0);
        assert_ne!(random_x0(5), random_x0(6));
    }
}
