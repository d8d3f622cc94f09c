//! Output formats and series file reading.
//!
//! Series files are CSV with one sample per line, written with the
//! shortest representation that round-trips exactly. Result records are
//! JSON with every number carrying 17 significant digits.

use std::path::Path;

use crate::error::{Error, Result};
use crate::hrv::LongTermReport;
use crate::ktest::{KResult, Trajectory2D};
use crate::series::{Series, Unit};

/// One sample per line; `Display` of f64 round-trips exactly.
pub fn series_to_csv(series: &Series) -> String {
    let mut out = String::new();
    for x in series.samples() {
        out.push_str(&format!("{x}\n"));
    }
    out
}

/// Read a plain series file: one sample per line, blank lines ignored.
/// Samples must be finite but may have any sign.
pub fn read_series_file(path: &Path, unit: Unit) -> Result<Series> {
    let content = std::fs::read_to_string(path)?;
    let mut samples = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value: f64 = trimmed
            .parse()
            .map_err(|_| Error::ParseError { line: idx + 1 })?;
        if !value.is_finite() {
            return Err(Error::ValueError {
                line: idx + 1,
                reason: format!("sample {value} is not finite"),
            });
        }
        samples.push(value);
    }
    Series::new(samples, unit)
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_array(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|&v| fmt_f64(v)).collect();
    format!("[{}]", items.join(","))
}

fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Flat JSON record of a K test outcome with parallel `c_grid` / `k_per_c`
/// arrays.
pub fn k_result_to_json(result: &KResult) -> String {
    format!(
        "{{\"c_bar\":{},\"sigma\":{},\"n_cut\":{},\"threshold\":{},\"k\":{},\
         \"classification\":\"{}\",\"c_grid\":{},\"k_per_c\":{}}}",
        fmt_f64(result.c_bar),
        fmt_f64(result.sigma),
        result.n_cut,
        fmt_f64(result.threshold),
        fmt_f64(result.k),
        result.classification,
        fmt_array(&result.c_grid),
        fmt_array(&result.k_per_c),
    )
}

/// JSON record of a long-term analysis: windowed sigma, full-series K and
/// band K values.
pub fn long_term_report_to_json(report: &LongTermReport) -> String {
    let per_window = report
        .sigma
        .per_window
        .as_deref()
        .unwrap_or(&[])
        .iter()
        .map(|(start, sigma)| format!("[{},{}]", start, fmt_f64(*sigma)))
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "{{\"id\":\"{}\",\"sigma\":{{\"sigma\":{},\"per_window\":[{}]}},\
         \"k_full\":{},\"k_lf\":{},\"k_hf\":{},\"mean_rr_s\":{}}}",
        escape_json(&report.id),
        fmt_f64(report.sigma.sigma),
        per_window,
        k_result_to_json(&report.k_full),
        fmt_f64(report.k_lf),
        fmt_f64(report.k_hf),
        fmt_f64(report.mean_rr_s),
    )
}

/// Batch table of long-term reports.
pub fn long_term_reports_to_csv(reports: &[LongTermReport]) -> String {
    let mut out = String::from("id,sigma_mean,k_full,k_lf,k_hf,classification\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.id,
            fmt_f64(r.sigma.sigma),
            fmt_f64(r.k_full.k),
            fmt_f64(r.k_lf),
            fmt_f64(r.k_hf),
            r.k_full.classification,
        ));
    }
    out
}

/// Per-frequency score dump: `c,k_c` rows.
pub fn kc_dump_csv(result: &KResult) -> String {
    let mut out = String::from("c,k_c\n");
    for (c, k) in result.c_grid.iter().zip(result.k_per_c.iter()) {
        out.push_str(&format!("{},{}\n", fmt_f64(*c), fmt_f64(*k)));
    }
    out
}

/// Phase-space trajectory dump: `p,q` rows.
pub fn trajectory_to_csv(traj: &Trajectory2D) -> String {
    let mut out = String::from("p,q\n");
    for (p, q) in traj.p.iter().zip(traj.q.iter()) {
        out.push_str(&format!("{},{}\n", fmt_f64(*p), fmt_f64(*q)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ktest::{k_statistic, TestConfig};

    #[test]
    fn series_csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        let original = Series::unitless(vec![
            0.5,
            0.9925,
            0.029551749999999994,
            -1.0 / 3.0,
            1e-308,
        ])
        .unwrap();
        std::fs::write(&path, series_to_csv(&original)).unwrap();
        let read = read_series_file(&path, Unit::Unitless).unwrap();
        assert_eq!(read.samples(), original.samples());
    }

    #[test]
    fn series_csv_starts_with_exact_literals() {
        let s = Series::unitless(vec![0.5, 0.9925]).unwrap();
        assert_eq!(series_to_csv(&s), "0.5\n0.9925\n");
    }

    #[test]
    fn read_series_rejects_garbage_with_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "0.5\nnope\n").unwrap();
        assert!(matches!(
            read_series_file(&path, Unit::Unitless),
            Err(Error::ParseError { line: 2 })
        ));
    }

    #[test]
    fn k_result_json_is_valid_and_precise() {
        let samples: Vec<f64> = (0..200).map(|i| (i as f64 * 0.7).sin() * 0.4 + 0.5).collect();
        let series = Series::unitless(samples).unwrap();
        let cfg = TestConfig {
            sigma: Some(0.01),
            c_grid_size: 5,
            ..TestConfig::default()
        };
        let result = k_statistic(&series, &cfg).unwrap();
        let json = k_result_to_json(&result);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["n_cut"], result.n_cut);
        assert_eq!(value["classification"], result.classification.to_string());
        let k_back = value["k"].as_f64().unwrap();
        assert_eq!(k_back, result.k, "17-digit output must round-trip");
        assert_eq!(
            value["c_grid"].as_array().unwrap().len(),
            value["k_per_c"].as_array().unwrap().len()
        );
    }
}
