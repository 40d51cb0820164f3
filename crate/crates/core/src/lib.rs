//! Two-stage procedures for fixed-width confidence intervals.
//!
//! A run draws a three-observation pilot, sizes a first-stage sample from
//! it, estimates the asymptotic variance of the estimator from that sample,
//! and tops the sample up to the estimated optimal size
//! `N̂_opt = max{N₀, ⌊σ̂²z²/d²⌋ + 1}`. The result is the interval
//! `[μ̂ − d, μ̂ + d]` after at most three queries to the data source.
//!
//! Supported targets are a univariate mean ([`engine::run_univariate`]), a
//! projection `w'μ` of a vector mean ([`engine::run_projection`]) and the
//! common mean of two samples with random convex weights
//! ([`engine::run_common_mean`]). [`simulate`] holds the Monte Carlo harness
//! and [`validation`] the acceptance checks.

pub mod config;
pub mod engine;
pub mod error;
pub mod estimators;
pub mod interval;
pub mod quantile;
pub mod rules;
pub mod simulate;
pub mod summary;
pub mod validation;

pub use config::{FirstStageRule, ProcedureConfig};
pub use engine::{
    run_common_mean, run_projection, run_univariate, DataSource, ProcedureKind, Synthetic, TwoStageReport, VecSource,
};
pub use error::{Error, Result};
pub use estimators::{ProjectionSpec, WeightSpec};
pub use interval::FixedWidthInterval;
pub use quantile::normal_quantile;
pub use summary::{summarize, SummaryStats};
