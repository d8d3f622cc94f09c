//! Growth-rate statistic K for noisy time series.
//!
//! The estimator maps a scalar series into a two-dimensional (p, q)
//! trajectory at a fixed normalized frequency c, measures the time-averaged
//! mean square displacement of that trajectory over lags 1..n_cut, removes
//! the oscillatory component driven by the series mean, adds a noise-driven
//! regularization term whose amplitude follows an inverse Gaussian density,
//! and scores the profile's growth by its Pearson correlation with the lag
//! index. The final K is the median of the per-frequency scores over a grid
//! centred on the spectral frequency of smallest magnitude; K near 1 flags
//! chaotic dynamics, K near 0 regular dynamics.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::estimate_sigma;
use crate::series::{median, range_of, Series};

/// Lower clamp bound of the evaluation grid; mirrored at 2*pi - C_GRID_MIN.
const C_GRID_MIN: f64 = 0.02;
/// Grid points with 1 - cos(c) at or below this are dropped as resonant.
const RESONANCE_TOL: f64 = 1e-8;
/// Spectral magnitudes at or below this fraction of the maximum count as zero.
const SPECTRUM_REL_TOL: f64 = 1e-12;

/// Form of the regularization term added in the inverse-Gaussian step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IgMode {
    /// `A * sin(sqrt(2) * n)`: an oscillation over the lag index.
    Oscillatory,
    /// `A * sin(sqrt(2))`: a constant offset, inert under the Pearson
    /// correlation.
    ConstantLiteral,
    /// Skip the regularization step entirely.
    Off,
}

/// Exponent applied to the series mean in the oscillation correction.
pub const OSC_EXPONENT_SQUARED: u32 = 2;

/// Configuration of the K estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestConfig {
    /// Maximum displacement lag; `None` resolves to `floor(N / 10)`.
    pub n_cut: Option<usize>,
    /// Inverse-Gaussian shape parameter.
    pub ell: f64,
    /// Inverse-Gaussian mean parameter.
    pub m: f64,
    pub ig_mode: IgMode,
    /// 1 or 2; power of the series mean in the oscillation correction.
    pub osc_exponent: u32,
    pub c_grid_size: usize,
    pub c_halfwidth: f64,
    pub threshold: f64,
    /// Noise standard deviation; `None` means estimate it from the series.
    pub sigma: Option<f64>,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            n_cut: None,
            ell: 2.0,
            m: 3.0,
            ig_mode: IgMode::Oscillatory,
            osc_exponent: OSC_EXPONENT_SQUARED,
            c_grid_size: 100,
            c_halfwidth: 0.5,
            threshold: 0.9,
            sigma: None,
        }
    }
}

impl TestConfig {
    /// Literal-text reproduction settings: first-power mean in the
    /// oscillation correction and the constant regularization term.
    pub fn strict_paper() -> Self {
        Self {
            osc_exponent: 1,
            ig_mode: IgMode::ConstantLiteral,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(n_cut) = self.n_cut {
            if n_cut < 2 {
                return Err(Error::InvalidConfig(format!(
                    "n_cut = {n_cut} must be >= 2"
                )));
            }
        }
        if !(self.ell > 0.0) {
            return Err(Error::InvalidConfig(format!("ell = {} must be > 0", self.ell)));
        }
        if !(self.m > 0.0) {
            return Err(Error::InvalidConfig(format!("m = {} must be > 0", self.m)));
        }
        if self.osc_exponent != 1 && self.osc_exponent != 2 {
            return Err(Error::InvalidConfig(format!(
                "osc_exponent = {} must be 1 or 2",
                self.osc_exponent
            )));
        }
        if self.c_grid_size < 1 {
            return Err(Error::InvalidConfig("c_grid_size must be >= 1".into()));
        }
        if !(self.c_halfwidth > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "c_halfwidth = {} must be > 0",
                self.c_halfwidth
            )));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "threshold = {} must lie in (0, 1)",
                self.threshold
            )));
        }
        if let Some(sigma) = self.sigma {
            if !(sigma >= 0.0) || !sigma.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "sigma = {sigma} must be finite and >= 0"
                )));
            }
        }
        Ok(())
    }

    /// Lag cutoff for a series of length `n`, checked against 2 <= n_cut <= n-1.
    pub fn resolve_n_cut(&self, n: usize) -> Result<usize> {
        let n_cut = self.n_cut.unwrap_or(n / 10);
        if n_cut < 2 || n_cut + 1 > n {
            return Err(Error::InvalidConfig(format!(
                "n_cut = {n_cut} outside [2, {}] for series of length {n}",
                n - 1
            )));
        }
        Ok(n_cut)
    }
}

/// Regular/chaotic verdict against the configured threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Regular,
    Chaotic,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::Regular => write!(f, "regular"),
            Classification::Chaotic => write!(f, "chaotic"),
        }
    }
}

/// Two-dimensional phase-space trajectory at frequency `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory2D {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub c: f64,
}

/// Displacement profiles for one frequency: raw, oscillation-corrected and
/// regularized, plus the noise ratio beta driving the regularization.
#[derive(Debug, Clone, PartialEq)]
pub struct MsdProfile {
    pub m_c: Vec<f64>,
    pub d_c: Vec<f64>,
    pub d_tilde: Vec<f64>,
    pub beta: f64,
}

/// Outcome of the K test on one series.
#[derive(Debug, Clone, PartialEq)]
pub struct KResult {
    pub c_bar: f64,
    pub sigma: f64,
    pub n_cut: usize,
    pub threshold: f64,
    pub k: f64,
    pub classification: Classification,
    pub c_grid: Vec<f64>,
    pub k_per_c: Vec<f64>,
}

/// Cumulative translation variables
/// `p(n) = sum_{j=1..n} x(j) cos(jc)` and `q(n)` with sine weights.
pub fn translation_vars(series: &Series, c: f64) -> Result<Trajectory2D> {
    if !(c > 0.0 && c < 2.0 * PI) {
        return Err(Error::InvalidC { c });
    }
    let samples = series.samples();
    let mut p = Vec::with_capacity(samples.len());
    let mut q = Vec::with_capacity(samples.len());
    let (mut acc_p, mut acc_q) = (0.0, 0.0);
    for (i, &x) in samples.iter().enumerate() {
        let (sin, cos) = ((i + 1) as f64 * c).sin_cos();
        acc_p += x * cos;
        acc_q += x * sin;
        p.push(acc_p);
        q.push(acc_q);
    }
    Ok(Trajectory2D { p, q, c })
}

thread_local! {
    static FFT_PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_fft(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    FFT_PLANNER.with(|planner| match direction {
        FftDirection::Forward => planner.borrow_mut().plan_fft_forward(len),
        FftDirection::Inverse => planner.borrow_mut().plan_fft_inverse(len),
    })
}

/// `sum_{j=1..N-n} (p(j) p(j+n) + q(j) q(j+n))` for every lag n in 0..N,
/// via one complex FFT round trip on the packed signal p + iq.
fn lagged_products(p: &[f64], q: &[f64]) -> Vec<f64> {
    let n = p.len();
    let padded = (2 * n).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); padded];
    for j in 0..n {
        buf[j] = Complex64::new(p[j], q[j]);
    }
    plan_fft(padded, FftDirection::Forward).process(&mut buf);
    // |P_k|^2 + |Q_k|^2 reconstructed from the packed spectrum using the
    // conjugate symmetry of the real parts.
    let mut spectrum = vec![Complex64::new(0.0, 0.0); padded];
    for k in 0..padded {
        let mirror = if k == 0 { 0 } else { padded - k };
        let power = 0.5 * (buf[k].norm_sqr() + buf[mirror].norm_sqr());
        spectrum[k] = Complex64::new(power, 0.0);
    }
    plan_fft(padded, FftDirection::Inverse).process(&mut spectrum);
    let scale = 1.0 / padded as f64;
    spectrum[..n].iter().map(|z| z.re * scale).collect()
}

/// Time-averaged mean square displacement
/// `M(n) = (1/(N-n)) sum_{j=1..N-n} ([p(j+n)-p(j)]^2 + [q(j+n)-q(j)]^2)`
/// for n = 1..n_cut.
///
/// Computed through the autocorrelation identity with an FFT, which
/// reorders the arithmetic of the direct double loop; agreement is within
/// 1e-10 relative (verified against the brute-force oracle in the tests).
pub fn mean_square_displacement(traj: &Trajectory2D, n_cut: usize) -> Result<Vec<f64>> {
    let n = traj.p.len();
    if n_cut + 1 > n {
        return Err(Error::TooShort {
            needed: n_cut + 1,
            got: n,
        });
    }
    let products = lagged_products(&traj.p, &traj.q);
    // prefix[i] = sum_{j<i} p(j)^2 + q(j)^2
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for j in 0..n {
        acc += traj.p[j] * traj.p[j] + traj.q[j] * traj.q[j];
        prefix.push(acc);
    }
    let total = prefix[n];
    Ok((1..=n_cut)
        .map(|lag| {
            let sum_sq = (total - prefix[lag]) + prefix[n - lag];
            let displacement = sum_sq - 2.0 * products[lag];
            // Exact zero displacements can round to tiny negatives.
            displacement.max(0.0) / (n - lag) as f64
        })
        .collect())
}

/// Oscillation-corrected displacement
/// `D(n) = M(n) - mean^e (1 - cos(nc)) / (1 - cos c)`.
pub fn modified_msd(
    m_c: &[f64],
    series_mean: f64,
    c: f64,
    osc_exponent: u32,
) -> Result<Vec<f64>> {
    if osc_exponent != 1 && osc_exponent != 2 {
        return Err(Error::InvalidConfig(format!(
            "osc_exponent = {osc_exponent} must be 1 or 2"
        )));
    }
    let denom = 1.0 - c.cos();
    if denom.abs() <= RESONANCE_TOL {
        return Err(Error::ResonantC { c });
    }
    let factor = series_mean.powi(osc_exponent as i32);
    Ok(m_c
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let lag = (i + 1) as f64;
            m - factor * (1.0 - (lag * c).cos()) / denom
        })
        .collect())
}

/// Amplitude of the inverse-Gaussian density with shape `ell` and mean `m`
/// at `beta`; zero in the vanishing-noise limit `beta = +inf`.
pub fn ig_amplitude(beta: f64, ell: f64, m: f64) -> f64 {
    if !beta.is_finite() {
        return 0.0;
    }
    (ell / (2.0 * PI * beta.powi(3))).sqrt()
        * (-ell * (beta - m).powi(2) / (2.0 * m * m * beta)).exp()
}

/// Regularized displacement profile and the noise ratio
/// `beta = n_cut * range / sigma` (`+inf` when sigma = 0).
pub fn regularized_msd(
    d_c: &[f64],
    sigma: f64,
    series_range: f64,
    cfg: &TestConfig,
) -> (Vec<f64>, f64) {
    let n_cut = d_c.len();
    let beta = if sigma == 0.0 {
        f64::INFINITY
    } else {
        n_cut as f64 * series_range / sigma
    };
    let amplitude = ig_amplitude(beta, cfg.ell, cfg.m);
    let sqrt2 = std::f64::consts::SQRT_2;
    let d_tilde = match cfg.ig_mode {
        IgMode::Off => d_c.to_vec(),
        IgMode::ConstantLiteral => {
            let term = amplitude * sqrt2.sin();
            d_c.iter().map(|&d| d + term).collect()
        }
        IgMode::Oscillatory => d_c
            .iter()
            .enumerate()
            .map(|(i, &d)| d + amplitude * (sqrt2 * (i + 1) as f64).sin())
            .collect(),
    };
    (d_tilde, beta)
}

/// Pearson correlation between the lag index vector 1..n_cut and the
/// displacement profile; always within [-1, 1].
pub fn correlation_k(d_tilde: &[f64]) -> Result<f64> {
    let n = d_tilde.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let mean_u = (n as f64 + 1.0) / 2.0;
    let mean_d = d_tilde.iter().sum::<f64>() / n as f64;
    let mut cov = 0.0;
    let mut var_u = 0.0;
    let mut var_d = 0.0;
    for (i, &d) in d_tilde.iter().enumerate() {
        let du = (i + 1) as f64 - mean_u;
        let dd = d - mean_d;
        cov += du * dd;
        var_u += du * du;
        var_d += dd * dd;
    }
    if var_d == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((cov / (var_u * var_d).sqrt()).clamp(-1.0, 1.0))
}

/// Frequency of the smallest non-zero spectral magnitude of the
/// mean-removed series, as a normalized frequency in (0, 2*pi).
///
/// Magnitudes of mirrored bins k and N-k are identical for real input;
/// that symmetry is enforced exactly so the smallest-frequency tie-break
/// is deterministic.
pub fn select_c_bar(series: &Series) -> Result<f64> {
    let x = series.samples();
    let n = x.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let mean = series.mean();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    plan_fft(n, FftDirection::Forward).process(&mut buf);

    let mut magnitudes = vec![0.0; n];
    for k in 1..n {
        let source = k.min(n - k);
        if source == k {
            magnitudes[k] = buf[k].norm();
        } else {
            magnitudes[k] = magnitudes[source];
        }
    }
    let max_mag = magnitudes[1..].iter().copied().fold(0.0, f64::max);
    let eps_mag = SPECTRUM_REL_TOL * max_mag;
    let mut best: Option<(usize, f64)> = None;
    for (k, &mag) in magnitudes.iter().enumerate().skip(1) {
        if mag > eps_mag {
            let better = match best {
                Some((_, current)) => mag < current,
                None => true,
            };
            if better {
                best = Some((k, mag));
            }
        }
    }
    match best {
        Some((k, _)) => Ok(2.0 * PI * k as f64 / n as f64),
        None => Err(Error::NoValidFrequency),
    }
}

/// Chaotic iff `k` strictly exceeds the threshold.
pub fn classify(k: f64, threshold: f64) -> Classification {
    debug_assert!(threshold > 0.0 && threshold < 1.0);
    if k > threshold {
        Classification::Chaotic
    } else {
        Classification::Regular
    }
}

/// Evenly spaced grid on `[centre - halfwidth, centre + halfwidth]`,
/// restricted to the admissible frequency range with resonant points
/// removed.
///
/// Points outside the range are dropped rather than moved to the
/// boundary: squashing them would pile duplicates onto the boundary
/// frequency and let that single frequency dominate the median.
fn frequency_grid(centre: f64, halfwidth: f64, size: usize) -> Vec<f64> {
    let c_max = 2.0 * PI - C_GRID_MIN;
    let points: Vec<f64> = if size == 1 {
        vec![centre]
    } else {
        let step = 2.0 * halfwidth / (size - 1) as f64;
        (0..size).map(|i| centre - halfwidth + i as f64 * step).collect()
    };
    points
        .into_iter()
        .filter(|&c| (C_GRID_MIN..=c_max).contains(&c))
        .filter(|&c| 1.0 - c.cos() > RESONANCE_TOL)
        .collect()
}

/// Shared per-series state for the per-frequency pipeline.
struct CPipeline<'a> {
    series: &'a Series,
    n_cut: usize,
    mean: f64,
    range: f64,
    sigma: f64,
    cfg: &'a TestConfig,
}

impl CPipeline<'_> {
    /// Steps 1-5 for one frequency. Returns the correlation score and a
    /// flag marking a degenerate (constant-profile) input.
    fn k_for_c(&self, c: f64) -> Result<(f64, bool)> {
        let traj = translation_vars(self.series, c)?;
        let m_c = mean_square_displacement(&traj, self.n_cut)?;
        let d_c = modified_msd(&m_c, self.mean, c, self.cfg.osc_exponent)?;
        let (d_tilde, _beta) = regularized_msd(&d_c, self.sigma, self.range, self.cfg);
        match correlation_k(&d_tilde) {
            Ok(k) => Ok((k, false)),
            Err(Error::ZeroVariance) => Ok((0.0, true)),
            Err(e) => Err(e),
        }
    }

    fn k_over_grid(&self, grid: &[f64]) -> Result<(Vec<f64>, usize)> {
        let scored: Vec<(f64, bool)> = grid
            .par_iter()
            .map(|&c| self.k_for_c(c))
            .collect::<Result<_>>()?;
        let degenerate = scored.iter().filter(|(_, d)| *d).count();
        Ok((scored.into_iter().map(|(k, _)| k).collect(), degenerate))
    }
}

fn resolve_sigma(series: &Series, cfg: &TestConfig) -> Result<f64> {
    match cfg.sigma {
        Some(sigma) => Ok(sigma),
        None => estimate_sigma(series),
    }
}

/// Full displacement pipeline for a single frequency; useful for
/// inspecting intermediate profiles.
pub fn displacement_profile(
    series: &Series,
    c: f64,
    cfg: &TestConfig,
) -> Result<MsdProfile> {
    cfg.validate()?;
    let n_cut = cfg.resolve_n_cut(series.len())?;
    let sigma = resolve_sigma(series, cfg)?;
    let traj = translation_vars(series, c)?;
    let m_c = mean_square_displacement(&traj, n_cut)?;
    let d_c = modified_msd(&m_c, series.mean(), c, cfg.osc_exponent)?;
    let (d_tilde, beta) = regularized_msd(&d_c, sigma, range_of(series), cfg);
    Ok(MsdProfile {
        m_c,
        d_c,
        d_tilde,
        beta,
    })
}

/// The K statistic: median of the per-frequency correlation scores over a
/// grid centred on the spectral frequency of smallest magnitude.
pub fn k_statistic(series: &Series, cfg: &TestConfig) -> Result<KResult> {
    cfg.validate()?;
    let n = series.len();
    if n < 20 {
        return Err(Error::TooShort { needed: 20, got: n });
    }
    let n_cut = cfg.resolve_n_cut(n)?;
    let sigma = resolve_sigma(series, cfg)?;
    let c_bar = select_c_bar(series)?;
    let grid = frequency_grid(c_bar, cfg.c_halfwidth, cfg.c_grid_size);
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let pipeline = CPipeline {
        series,
        n_cut,
        mean: series.mean(),
        range: range_of(series),
        sigma,
        cfg,
    };
    let (k_per_c, degenerate) = pipeline.k_over_grid(&grid)?;
    if degenerate > 0 {
        log::warn!(
            "degenerate input: {degenerate} of {} frequencies produced a constant \
             displacement profile; their scores were set to 0",
            grid.len()
        );
    }
    let k = median(&k_per_c);
    Ok(KResult {
        c_bar,
        sigma,
        n_cut,
        threshold: cfg.threshold,
        k,
        classification: classify(k, cfg.threshold),
        c_grid: grid,
        k_per_c,
    })
}

/// Normalized frequency for a physical frequency in Hz, with the series'
/// mean interval as the sampling period.
pub fn hz_to_c(f_hz: f64, mean_interval_s: f64) -> f64 {
    2.0 * PI * f_hz * mean_interval_s
}

/// Median K over a grid of frequencies spanning a physical band in Hz.
///
/// The band is mapped to normalized frequency through the mean sample
/// interval and clamped into the admissible range.
pub fn band_k(
    series: &Series,
    cfg: &TestConfig,
    band_hz: (f64, f64),
    mean_interval_s: f64,
) -> Result<f64> {
    cfg.validate()?;
    let (f_lo, f_hi) = band_hz;
    if !(f_lo > 0.0) || !(mean_interval_s > 0.0) {
        return Err(Error::DomainError(format!(
            "band ({f_lo}, {f_hi}) Hz at mean interval {mean_interval_s} s: \
             frequencies and interval must be positive"
        )));
    }
    if !(f_hi > f_lo) {
        return Err(Error::EmptyGrid);
    }
    let n = series.len();
    if n < 20 {
        return Err(Error::TooShort { needed: 20, got: n });
    }
    let n_cut = cfg.resolve_n_cut(n)?;
    let sigma = resolve_sigma(series, cfg)?;
    let c_max = 2.0 * PI - C_GRID_MIN;
    let c_lo = hz_to_c(f_lo, mean_interval_s).clamp(C_GRID_MIN, c_max);
    let c_hi = hz_to_c(f_hi, mean_interval_s).clamp(C_GRID_MIN, c_max);
    if !(c_hi > c_lo) {
        return Err(Error::EmptyGrid);
    }
    let size = cfg.c_grid_size;
    let grid: Vec<f64> = if size == 1 {
        vec![0.5 * (c_lo + c_hi)]
    } else {
        let step = (c_hi - c_lo) / (size - 1) as f64;
        (0..size)
            .map(|i| c_lo + i as f64 * step)
            .filter(|&c| 1.0 - c.cos() > RESONANCE_TOL)
            .collect()
    };
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let pipeline = CPipeline {
        series,
        n_cut,
        mean: series.mean(),
        range: range_of(series),
        sigma,
        cfg,
    };
    let (k_per_c, degenerate) = pipeline.k_over_grid(&grid)?;
    if degenerate > 0 {
        log::warn!(
            "degenerate input in band K: {degenerate} of {} frequencies set to 0",
            grid.len()
        );
    }
    Ok(median(&k_per_c))
}
