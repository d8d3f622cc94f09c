//! Noise-aware 0-1 test for chaos.
//!
//! Classifies a scalar time series — assumed to be the output of a
//! deterministic map driven by dynamical noise — as regular or chaotic
//! through the asymptotic growth rate K of its mean square displacement in
//! a two-dimensional phase space. Ships with the synthetic map ensembles
//! used to validate the method (logistic and Pomeau-Manneville under
//! dynamical or output noise) and a long-term RR-interval analysis
//! pipeline with windowed noise estimation and band-restricted K.

pub mod bench;
pub mod error;
pub mod hrv;
pub mod io;
pub mod ktest;
pub mod maps;
pub mod noise;
pub mod series;

pub use error::{Error, Result};
pub use ktest::{
    band_k, classify, k_statistic, Classification, IgMode, KResult, TestConfig,
};
pub use maps::{generate, MapKind, MapSpec, NoiseKind, NoiseSpec};
pub use series::{range_of, summary_stats, GroupStats, Series, Unit};
