//! Long-term RR-interval analysis: file ingestion, windowing, windowed
//! noise estimation and band-restricted K.

use std::path::Path;

use crate::error::{Error, Result};
use crate::ktest::{band_k, k_statistic, KResult, TestConfig};
use crate::noise::{windowed_sigma, SigmaEstimate};
use crate::series::Series;

/// Low-frequency band in Hz.
pub const LF_BAND_HZ: (f64, f64) = (0.04, 0.15);
/// High-frequency band in Hz.
pub const HF_BAND_HZ: (f64, f64) = (0.15, 0.4);

/// Default analysis window width in samples.
pub const DEFAULT_WINDOW: usize = 5000;
/// Default shift between consecutive windows in samples.
pub const DEFAULT_SHIFT: usize = 2500;

/// Input file layout for RR-interval series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RrFormat {
    /// One decimal interval (seconds) per line; blank lines ignored.
    Plain,
    /// Comma-separated rows; the first numeric column is read, with an
    /// optional single header line.
    Csv,
}

/// One RR-interval recording.
#[derive(Debug, Clone, PartialEq)]
pub struct RrRecord {
    pub id: String,
    pub series: Series,
    pub source_path: String,
}

/// Outcome of the long-term protocol on one record.
#[derive(Debug, Clone, PartialEq)]
pub struct LongTermReport {
    pub id: String,
    pub sigma: SigmaEstimate,
    pub k_full: KResult,
    pub k_lf: f64,
    pub k_hf: f64,
    pub mean_rr_s: f64,
}

/// Read an RR-interval series from a text file.
///
/// Intervals must be strictly positive and finite; the record id defaults
/// to the file stem.
pub fn read_rr_series(path: &Path, format: RrFormat) -> Result<RrRecord> {
    let content = std::fs::read_to_string(path)?;
    let samples = parse_rr_text(&content, format)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned());
    Ok(RrRecord {
        id,
        series: Series::seconds(samples)?,
        source_path: path.to_string_lossy().into_owned(),
    })
}

/// Parse RR text content; line numbers in errors are 1-based.
pub fn parse_rr_text(content: &str, format: RrFormat) -> Result<Vec<f64>> {
    let mut samples = Vec::new();
    let mut column: Option<usize> = None;
    let mut header_allowance = matches!(format, RrFormat::Csv);
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value = match format {
            RrFormat::Plain => match trimmed.parse::<f64>() {
                Ok(v) => v,
                Err(_) => return Err(Error::ParseError { line: line_no }),
            },
            RrFormat::Csv => {
                let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
                let parsed = match column {
                    Some(col) => fields.get(col).and_then(|f| f.parse::<f64>().ok()),
                    None => {
                        // Lock onto the first numeric column of the first
                        // data row.
                        let found = fields
                            .iter()
                            .enumerate()
                            .find_map(|(i, f)| f.parse::<f64>().ok().map(|v| (i, v)));
                        if let Some((i, v)) = found {
                            column = Some(i);
                            Some(v)
                        } else {
                            None
                        }
                    }
                };
                match parsed {
                    Some(v) => v,
                    None if header_allowance => {
                        header_allowance = false;
                        continue;
                    }
                    None => return Err(Error::ParseError { line: line_no }),
                }
            }
        };
        if !value.is_finite() {
            return Err(Error::ValueError {
                line: line_no,
                reason: format!("interval {value} is not finite"),
            });
        }
        if value <= 0.0 {
            return Err(Error::ValueError {
                line: line_no,
                reason: format!("interval {value} is not strictly positive"),
            });
        }
        samples.push(value);
    }
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(samples)
}

/// Split a series into windows of `window` samples whose starts are
/// `shift` apart, 0-based.
///
/// If the last regular window does not end at the final sample, one more
/// window covering the last `window` samples is appended. A series shorter
/// than `window` yields a single window holding the whole series.
pub fn segment_series(
    series: &Series,
    window: usize,
    shift: usize,
) -> Result<Vec<(usize, Series)>> {
    if window < 3 {
        return Err(Error::InvalidConfig(format!(
            "window = {window} must be >= 3"
        )));
    }
    if shift < 1 {
        return Err(Error::InvalidConfig("shift must be >= 1".into()));
    }
    let n = series.len();
    let samples = series.samples();
    if n < window {
        return Ok(vec![(0, series.clone())]);
    }
    let mut windows = Vec::new();
    let mut start = 0;
    while start + window <= n {
        let segment = Series::new(samples[start..start + window].to_vec(), series.unit())?;
        windows.push((start, segment));
        start += shift;
    }
    let last_end = windows.last().map(|(s, _)| s + window).unwrap_or(0);
    if last_end != n {
        let start = n - window;
        let segment = Series::new(samples[start..].to_vec(), series.unit())?;
        windows.push((start, segment));
    }
    Ok(windows)
}

/// Long-term protocol with explicit window parameters: windowed sigma,
/// full-series K with that sigma, and band K in the LF and HF bands.
pub fn analyze_long_term_with(
    record: &RrRecord,
    cfg: &TestConfig,
    window: usize,
    shift: usize,
) -> Result<LongTermReport> {
    let series = &record.series;
    let sigma = windowed_sigma(series, window, shift)?;
    let cfg = TestConfig {
        sigma: Some(sigma.sigma),
        ..cfg.clone()
    };
    let k_full = k_statistic(series, &cfg)?;
    let mean_rr_s = series.mean();
    let k_lf = band_k(series, &cfg, LF_BAND_HZ, mean_rr_s)?;
    let k_hf = band_k(series, &cfg, HF_BAND_HZ, mean_rr_s)?;
    Ok(LongTermReport {
        id: record.id.clone(),
        sigma,
        k_full,
        k_lf,
        k_hf,
        mean_rr_s,
    })
}

/// Long-term protocol with the default 5000/2500 windowing.
pub fn analyze_long_term(record: &RrRecord, cfg: &TestConfig) -> Result<LongTermReport> {
    analyze_long_term_with(record, cfg, DEFAULT_WINDOW, DEFAULT_SHIFT)
}
