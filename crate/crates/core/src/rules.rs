//! Sample-size rules.
//!
//! The two-stage procedure needs only [`first_stage_three_obs`] (or
//! [`first_stage_gamma`]) followed by [`final_sample_size`]. Stein's rule and
//! the purely sequential Chow–Robbins and Mukhopadhyay scans are kept as
//! comparators; they take Student-t quantiles from a [`TQuantile`] provider.

use serde::{Deserialize, Serialize};

use crate::config::{two_sided_z, validate_half_width};
use crate::error::{Error, Result};
use crate::quantile::TQuantile;
use crate::summary::RunningStats;

/// Hard cap on the length of a sequential scan.
pub const DEFAULT_SCAN_CAP: u64 = 10_000_000;

// Largest count that survives an f64 round trip.
const MAX_COUNT: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSizePlan {
    pub n0: u64,
    pub n_final: u64,
    /// Real-valued optimum, present when the true variance was supplied.
    pub n_opt_star: Option<f64>,
}

impl SampleSizePlan {
    /// Final-stage plan from a first-stage size and its variance estimate.
    pub fn from_stage_one(n0: u64, sigma2_hat_n0: f64, alpha: f64, d: f64) -> Result<Self> {
        Ok(SampleSizePlan {
            n0,
            n_final: final_sample_size(sigma2_hat_n0, n0, alpha, d)?,
            n_opt_star: None,
        })
    }

    pub fn with_true_variance(mut self, sigma2: f64, alpha: f64, d: f64) -> Result<Self> {
        self.n_opt_star = Some(n_opt_star(sigma2, alpha, d)?);
        Ok(self)
    }
}

fn floor_plus_one(x: f64) -> Result<u64> {
    floor_count(x).map(|n| n + 1)
}

fn floor_count(x: f64) -> Result<u64> {
    if !(0.0..MAX_COUNT).contains(&x) {
        return Err(Error::domain(format!("sample size {x} is not representable")));
    }
    Ok(x.floor() as u64)
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite and nonnegative, got {v}")))
    }
}

/// `σ²_μ · Φ⁻¹(1 − α/2)² / d²`.
pub fn n_opt_star(sigma2_mu: f64, alpha: f64, d: f64) -> Result<f64> {
    nonnegative("asymptotic variance", sigma2_mu)?;
    validate_half_width(d)?;
    let z = two_sided_z(alpha)?;
    Ok(sigma2_mu * (z / d) * (z / d))
}

/// Three-observation rule: `max{N̄₀, ⌊z·σ̂₃/d⌋ + 1}` where `σ̂₃` is the
/// standard deviation of the pilot sample.
pub fn first_stage_three_obs(pilot_sd: f64, alpha: f64, d: f64, n0_min: u64) -> Result<u64> {
    nonnegative("pilot standard deviation", pilot_sd)?;
    validate_half_width(d)?;
    let z = two_sided_z(alpha)?;
    Ok(n0_min.max(floor_plus_one(z * (pilot_sd / d))?))
}

/// γ-rule: `max{N̄₀, ⌊(f·z/d)^{2/(1+γ)}⌋}`.
pub fn first_stage_gamma(f: f64, gamma: f64, alpha: f64, d: f64, n0_min: u64) -> Result<u64> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::domain(format!("f must be positive, got {f}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
    }
    validate_half_width(d)?;
    let z = two_sided_z(alpha)?;
    let base = f * z / d;
    Ok(n0_min.max(floor_count(base.powf(2.0 / (1.0 + gamma)))?))
}

/// Final size `max{N₀, ⌊σ̂²_{N₀}·z²/d²⌋ + 1}`.
pub fn final_sample_size(sigma2_hat_n0: f64, n0: u64, alpha: f64, d: f64) -> Result<u64> {
    let star = n_opt_star(sigma2_hat_n0, alpha, d)?;
    Ok(n0.max(floor_plus_one(star)?))
}

/// Stein's two-stage rule `max{N̄₀, ⌊t²·S²_{N̄₀}/d²⌋ + 1}`, with `t` the
/// `t(N̄₀ − 1)` quantile of order `1 − α/2`.
pub fn stein_rule(s2_pilot: f64, n0_min: u64, d: f64, t_quantile: f64) -> Result<u64> {
    nonnegative("pilot variance", s2_pilot)?;
    validate_half_width(d)?;
    let t_over_d = t_quantile / d;
    Ok(n0_min.max(floor_plus_one(t_over_d * t_over_d * s2_pilot)?))
}

/// Settings shared by the purely sequential scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanParams {
    pub n0_min: u64,
    pub alpha: f64,
    pub d: f64,
    pub cap: u64,
}

impl ScanParams {
    pub fn new(n0_min: u64, alpha: f64, d: f64) -> Self {
        ScanParams {
            n0_min,
            alpha,
            d,
            cap: DEFAULT_SCAN_CAP,
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }
}

/// Chow–Robbins: `inf{n ≥ N̄₀ : n ≥ t(n−1)²·S_n²/d²}`.
pub fn chow_robbins_scan<I, Q>(stream: I, params: &ScanParams, quantiles: &Q) -> Result<u64>
where
    I: IntoIterator<Item = f64>,
    Q: TQuantile + ?Sized,
{
    sequential_scan(stream, params, quantiles, |_| 0.0)
}

/// Mukhopadhyay's variant of the Chow–Robbins scan with `S_n² + 1/n`.
///
/// For `d ≤ 1` every stopping time satisfies `N′ ≥ t(N′−1)/d`; the customary
/// bound with `t(N̄₀−1)` in place of `t(N′−1)` can fail by one observation on
/// degenerate (zero-variance) streams.
pub fn mukhopadhyay_scan<I, Q>(stream: I, params: &ScanParams, quantiles: &Q) -> Result<u64>
where
    I: IntoIterator<Item = f64>,
    Q: TQuantile + ?Sized,
{
    sequential_scan(stream, params, quantiles, |n| 1.0 / n as f64)
}

fn sequential_scan<I, Q>(stream: I, params: &ScanParams, quantiles: &Q, inflate: impl Fn(u64) -> f64) -> Result<u64>
where
    I: IntoIterator<Item = f64>,
    Q: TQuantile + ?Sized,
{
    validate_half_width(params.d)?;
    crate::config::validate_alpha(params.alpha)?;
    if params.n0_min < 2 {
        return Err(Error::domain("sequential scans need N̄₀ ≥ 2"));
    }
    let p = 1.0 - params.alpha / 2.0;
    let mut stats = RunningStats::new();
    for x in stream {
        stats.push(x);
        let n = stats.count();
        if n < params.n0_min {
            continue;
        }
        if n > params.cap {
            return Err(Error::NonTermination { cap: params.cap });
        }
        let s2 = stats.variance_unbiased().expect("n >= 2");
        let t = quantiles.t_quantile(n - 1, p)?;
        let t_over_d = t / params.d;
        if n as f64 >= t_over_d * t_over_d * (s2 + inflate(n)) {
            return Ok(n);
        }
    }
    Err(Error::StreamEnded {
        consumed: stats.count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantile::StudentTQuantiles;
    use proptest::prelude::*;

    #[test]
    fn optimal_size() {
        assert_eq!(n_opt_star(0.0, 0.05, 0.3).unwrap(), 0.0);
        assert!((n_opt_star(1.0, 0.05, 0.3).unwrap() - 42.6836).abs() < 1e-3);
        assert!(n_opt_star(1.0, 0.05, 0.0).is_err());
        assert!(n_opt_star(-1.0, 0.05, 0.3).is_err());
    }

    #[test]
    fn three_observation_rule() {
        assert_eq!(first_stage_three_obs(0.0, 0.05, 0.1, 15).unwrap(), 15);
        assert_eq!(first_stage_three_obs(1.0, 0.05, 0.1, 15).unwrap(), 20);
        assert_eq!(first_stage_three_obs(1.0, 0.01, 0.05, 15).unwrap(), 52);
        assert!(first_stage_three_obs(-0.1, 0.05, 0.1, 15).is_err());
    }

    #[test]
    fn gamma_rule() {
        assert_eq!(first_stage_gamma(1.0, 1.0, 0.05, 0.1, 2).unwrap(), 19);
        assert_eq!(first_stage_gamma(1.0, 1e9, 0.05, 0.1, 30).unwrap(), 30);
        assert_eq!(first_stage_gamma(2.0, 1.0, 0.05, 0.2, 2).unwrap(), 19);
        assert!(first_stage_gamma(0.0, 1.0, 0.05, 0.1, 2).is_err());
        assert!(first_stage_gamma(1.0, -1.0, 0.05, 0.1, 2).is_err());
    }

    #[test]
    fn final_stage() {
        assert_eq!(final_sample_size(0.0, 20, 0.05, 0.1).unwrap(), 20);
        assert_eq!(final_sample_size(1.0, 20, 0.05, 0.1).unwrap(), 385);
        assert_eq!(final_sample_size(5.0 / 3.0, 20, 0.05, 0.3).unwrap(), 72);
        assert!(final_sample_size(1e300, 20, 0.05, 1e-10).is_err());
    }

    #[test]
    fn stein() {
        assert_eq!(stein_rule(0.0, 15, 0.3, 2.1448).unwrap(), 15);
        assert_eq!(stein_rule(1.0, 15, 0.3, 2.1448).unwrap(), 52);
        assert_eq!(stein_rule(1.0, 15, 0.1, 2.1448).unwrap(), 461);
    }

    #[test]
    fn plan_invariants() {
        let plan = SampleSizePlan::from_stage_one(20, 1.0, 0.05, 0.1)
            .unwrap()
            .with_true_variance(1.0, 0.05, 0.1)
            .unwrap();
        assert_eq!(plan.n_final, 385);
        assert!(plan.n_final as f64 >= plan.n_opt_star.unwrap());
    }

    #[test]
    fn constant_stream_stops_at_minimum() {
        let params = ScanParams::new(15, 0.05, 0.3);
        let t = StudentTQuantiles::default();
        let constant = std::iter::repeat(4.0);
        assert_eq!(chow_robbins_scan(constant.clone(), &params, &t).unwrap(), 15);
        assert_eq!(mukhopadhyay_scan(constant, &params, &t).unwrap(), 15);
    }

    #[test]
    fn mukhopadhyay_constant_stream_bound() {
        // Zero variance leaves only the 1/n term: n² ≥ t(n−1)²/d².
        let params = ScanParams::new(15, 0.05, 0.1);
        let t = StudentTQuantiles::default();
        let n = mukhopadhyay_scan(std::iter::repeat(1.0), &params, &t).unwrap();
        assert_eq!(n, 21);
        let t_at_stop = t.t_quantile(n - 1, 0.975).unwrap();
        assert!(n as f64 >= t_at_stop / params.d);
    }

    #[test]
    fn scan_errors() {
        let t = StudentTQuantiles::default();
        let params = ScanParams::new(5, 0.05, 0.01).with_cap(100);
        // Alternating ±1 has S² ≈ 1, needing ~38k observations.
        let alternating = (0..).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 });
        assert!(matches!(
            chow_robbins_scan(alternating, &params, &t),
            Err(Error::NonTermination { cap: 100 })
        ));
        let short = vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        assert!(matches!(
            chow_robbins_scan(short, &ScanParams::new(5, 0.05, 0.01), &t),
            Err(Error::StreamEnded { consumed: 6 })
        ));
    }

    #[test]
    fn nonincreasing_in_d_and_alpha() {
        let ds = [0.3, 0.1, 0.03, 0.01];
        let sizes: Vec<u64> = ds
            .iter()
            .map(|&d| first_stage_three_obs(1.0, 0.05, d, 15).unwrap())
            .collect();
        assert!(sizes.windows(2).all(|w| w[0] < w[1]), "{sizes:?}");
    }

    proptest! {
        #[test]
        fn final_size_monotone(
            s2 in 0.0f64..10.0,
            bump in 0.0f64..5.0,
            d in 0.01f64..1.0,
            shrink in 0.1f64..1.0,
            alpha in 0.001f64..0.5,
            n0 in 2u64..100,
        ) {
            let base = final_sample_size(s2, n0, alpha, d).unwrap();
            prop_assert!(final_sample_size(s2 + bump, n0, alpha, d).unwrap() >= base);
            prop_assert!(final_sample_size(s2, n0, alpha, d * shrink).unwrap() >= base);
            prop_assert!(final_sample_size(s2, n0, alpha * shrink, d).unwrap() >= base);
            prop_assert!(base as f64 >= n_opt_star(s2, alpha, d).unwrap());
            prop_assert!(base >= n0);
        }

        #[test]
        fn unit_change_invariance(
            sd in 0.0f64..5.0,
            d in 0.01f64..1.0,
            exp in -8i32..8,
            alpha in 0.001f64..0.5,
        ) {
            // Powers of two rescale without rounding.
            let c = 2f64.powi(exp);
            prop_assert_eq!(
                first_stage_three_obs(sd, alpha, d, 10).unwrap(),
                first_stage_three_obs(sd * c, alpha, d * c, 10).unwrap()
            );
            prop_assert_eq!(
                final_sample_size(sd * sd, 10, alpha, d).unwrap(),
                final_sample_size((sd * c) * (sd * c), 10, alpha, d * c).unwrap()
            );
            prop_assert_eq!(
                first_stage_gamma(sd.max(0.1), 1.0, alpha, d, 2).unwrap(),
                first_stage_gamma(sd.max(0.1) * c, 1.0, alpha, d * c, 2).unwrap()
            );
            prop_assert_eq!(
                stein_rule(sd * sd, 15, d, 2.1448).unwrap(),
                stein_rule((sd * c) * (sd * c), 15, d * c, 2.1448).unwrap()
            );
        }
    }
}
