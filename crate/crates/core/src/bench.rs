//! Synthetic validation campaign: seeded map ensembles across noise levels,
//! aggregated into table rows and boxplot data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ktest::{k_statistic, TestConfig};
use crate::maps::{calibrate_sigma, generate, random_x0, MapSpec, NoiseKind, NoiseSpec};
use crate::series::{median, summary_stats, GroupStats};

/// Initial-condition policy for ensemble runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum X0Policy {
    /// One x0 shared by every realization.
    Fixed(f64),
    /// Uniform in (0, 1), drawn per realization from its seed.
    Random,
}

impl Default for X0Policy {
    fn default() -> Self {
        X0Policy::Random
    }
}

/// One ensemble campaign: a map, a noise kind and a set of noise levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub map: MapSpec,
    pub noise_kind: NoiseKind,
    /// Noise levels as percentages of the noise-free range.
    pub pct_levels: Vec<f64>,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub seed_base: u64,
    #[serde(default)]
    pub x0_policy: X0Policy,
    #[serde(default)]
    pub test: TestConfig,
    /// Keep the per-realization K values for external plotting.
    #[serde(default)]
    pub dump_k: bool,
}

fn default_realizations() -> usize {
    100
}

fn default_n() -> usize {
    10_000
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        self.map.validate()?;
        self.test.validate()?;
        if self.realizations < 1 {
            return Err(Error::InvalidConfig("realizations must be >= 1".into()));
        }
        if self.n < 20 {
            return Err(Error::InvalidConfig(format!(
                "n = {} must be >= 20",
                self.n
            )));
        }
        if self.pct_levels.is_empty() {
            return Err(Error::InvalidConfig("pct_levels must be non-empty".into()));
        }
        if let Some(&pct) = self.pct_levels.iter().find(|&&p| !(p >= 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "pct level {pct} must be >= 0"
            )));
        }
        if let X0Policy::Fixed(x0) = self.x0_policy {
            if !(0.0..=1.0).contains(&x0) {
                return Err(Error::InvalidConfig(format!(
                    "fixed x0 = {x0} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Tukey boxplot summary: quartiles plus the most extreme values within
/// 1.5 IQR of the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boxplot {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
}

/// One table row: K statistics of an ensemble at one noise level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub map: String,
    pub noise_kind: NoiseKind,
    pub pct: f64,
    pub realizations: usize,
    pub stats: GroupStats,
    pub boxplot: Boxplot,
    /// Per-realization K values, in realization order; populated when the
    /// config requests a dump.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub k_values: Vec<f64>,
}

/// Linear-interpolation quantile on sorted data (the convention whose
/// 0.5-quantile equals the mean-of-middle-two median).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Tukey boxplot of a value multiset.
pub fn boxplot(values: &[f64]) -> Result<Boxplot> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let lo_fence = q1 - 1.5 * iqr;
    let hi_fence = q3 + 1.5 * iqr;
    let whisker_lo = sorted
        .iter()
        .copied()
        .find(|&v| v >= lo_fence)
        .unwrap_or(sorted[0]);
    let whisker_hi = sorted
        .iter()
        .rev()
        .copied()
        .find(|&v| v <= hi_fence)
        .unwrap_or(sorted[sorted.len() - 1]);
    Ok(Boxplot {
        q1,
        median: median(values),
        q3,
        whisker_lo,
        whisker_hi,
    })
}

/// K value for one realization of the configured ensemble.
///
/// Sigma is calibrated from the realization's own initial condition
/// (pct percent of its noise-free range), matching the generation
/// procedure, and passed to the test config.
fn realization_k(cfg: &BenchConfig, pct: f64, index: usize) -> Result<f64> {
    let seed = cfg.seed_base + index as u64;
    let x0 = match cfg.x0_policy {
        X0Policy::Fixed(x0) => x0,
        X0Policy::Random => random_x0(seed),
    };
    let sigma = if pct == 0.0 {
        0.0
    } else {
        calibrate_sigma(&cfg.map, x0, cfg.n, pct)?
    };
    let kind = if sigma == 0.0 {
        NoiseKind::None
    } else {
        cfg.noise_kind
    };
    let noise = NoiseSpec {
        kind,
        sigma,
        pct: Some(pct),
        seed,
    };
    let series = generate(&cfg.map, &noise, x0, cfg.n)?;
    let test = TestConfig {
        sigma: Some(sigma),
        ..cfg.test.clone()
    };
    Ok(k_statistic(&series, &test)?.k)
}

/// Run the campaign: one row per noise level, in config order.
///
/// Realization seeds are `seed_base + index`, so reruns with the same
/// config are bit-identical.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.pct_levels.len());
    for &pct in &cfg.pct_levels {
        let k_values: Vec<f64> = (0..cfg.realizations)
            .into_par_iter()
            .map(|i| realization_k(cfg, pct, i))
            .collect::<Result<_>>()?;
        let stats = summary_stats(&k_values, cfg.test.threshold)?;
        let boxplot = boxplot(&k_values)?;
        rows.push(BenchRow {
            map: cfg.map.label(),
            noise_kind: cfg.noise_kind,
            pct,
            realizations: cfg.realizations,
            stats,
            boxplot,
            k_values: if cfg.dump_k { k_values } else { Vec::new() },
        });
    }
    Ok(rows)
}

fn noise_kind_label(kind: NoiseKind) -> &'static str {
    match kind {
        NoiseKind::None => "none",
        NoiseKind::Dynamical => "dynamical",
        NoiseKind::Output => "output",
    }
}

/// CSV table of benchmark rows, one row per line with a header.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "map,noise_kind,pct,realizations,median,mad,min,max,frac_below,threshold,\
         q1,q3,whisker_lo,whisker_hi\n",
    );
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            row.map,
            noise_kind_label(row.noise_kind),
            row.pct,
            row.realizations,
            row.stats.median,
            row.stats.mad,
            row.stats.min,
            row.stats.max,
            row.stats.frac_below,
            row.stats.threshold,
            row.boxplot.q1,
            row.boxplot.q3,
            row.boxplot.whisker_lo,
            row.boxplot.whisker_hi,
        ));
    }
    out
}

/// Per-realization K dump: `realization,k` rows, sorted by index.
pub fn k_dump_csv(row: &BenchRow) -> String {
    let mut out = String::from("realization,k\n");
    for (i, k) in row.k_values.iter().enumerate() {
        out.push_str(&format!("{i},{k:.16e}\n"));
    }
    out
}

/// JSON array of benchmark rows.
pub fn rows_to_json(rows: &[BenchRow]) -> String {
    serde_json::to_string_pretty(rows).expect("bench rows serialize")
}
