//! Series container and the descriptive statistics used in result tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical unit tag of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    /// RR intervals in seconds.
    Seconds,
    /// Dimensionless map outputs.
    Unitless,
}

/// Ordered sequence of finite real samples.
///
/// Construction validates that the series is non-empty and every sample is
/// finite; both invariants are relied upon throughout the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    samples: Vec<f64>,
    unit: Unit,
}

impl Series {
    pub fn new(samples: Vec<f64>, unit: Unit) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { samples, unit })
    }

    /// Unitless series, the common case for map outputs.
    pub fn unitless(samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, Unit::Unitless)
    }

    /// RR-interval series in seconds.
    pub fn seconds(samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, Unit::Seconds)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// First `n` samples as a new series. `n` is clamped to the length.
    pub fn truncated(&self, n: usize) -> Series {
        let n = n.clamp(1, self.samples.len());
        Series {
            samples: self.samples[..n].to_vec(),
            unit: self.unit,
        }
    }
}

/// Ensemble summary: median, MAD, extrema and the fraction of values
/// strictly below a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub median: f64,
    pub mad: f64,
    pub min: f64,
    pub max: f64,
    pub frac_below: f64,
    pub threshold: f64,
}

/// Median of a non-empty slice; for even lengths the mean of the two
/// central order statistics.
pub fn median(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Median absolute deviation from the median.
pub fn mad(values: &[f64]) -> f64 {
    let med = median(values);
    let deviations: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    median(&deviations)
}

/// Summary statistics of an ensemble of values against a threshold.
///
/// `frac_below` counts values strictly below `threshold`.
pub fn summary_stats(values: &[f64], threshold: f64) -> Result<GroupStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(index) = values.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let med = median(values);
    let mad = mad(values);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let below = values.iter().filter(|&&v| v < threshold).count();
    Ok(GroupStats {
        median: med,
        mad,
        min,
        max,
        frac_below: below as f64 / values.len() as f64,
        threshold,
    })
}

/// Series range, max(samples) - min(samples).
pub fn range_of(series: &Series) -> f64 {
    let min = series.samples().iter().copied().fold(f64::INFINITY, f64::min);
    let max = series
        .samples()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    max - min
}
