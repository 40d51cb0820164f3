use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean and variance of a univariate sample.
///
/// `s2_unbiased` uses divisor `n − 1`, `s2_mle` divisor `n`; both are `None`
/// for a single observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: u64,
    pub mean: f64,
    pub s2_unbiased: Option<f64>,
    pub s2_mle: Option<f64>,
}

impl SummaryStats {
    pub fn sd(&self) -> Option<f64> {
        self.s2_unbiased.map(f64::sqrt)
    }
}

/// Two-pass mean and variance.
pub fn summarize(x: &[f64]) -> Result<SummaryStats> {
    if x.is_empty() {
        return Err(Error::domain("cannot summarize an empty sample"));
    }
    let n = x.len() as f64;
    let mut mean = x.iter().sum::<f64>() / n;
    // Rounding can push the mean a hair outside the data range.
    let (lo, hi) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    mean = mean.clamp(lo, hi);
    if x.len() == 1 {
        return Ok(SummaryStats {
            n: 1,
            mean,
            s2_unbiased: None,
            s2_mle: None,
        });
    }
    let ss = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    Ok(SummaryStats {
        n: x.len() as u64,
        mean,
        s2_unbiased: Some(ss / (n - 1.0)),
        s2_mle: Some(ss / n),
    })
}

/// Welford accumulator for streams where the variance is needed after every
/// observation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance_unbiased(&self) -> Option<f64> {
        (self.n >= 2).then(|| self.m2.max(0.0) / (self.n - 1) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_computed() {
        let s = summarize(&[10.0, 10.0, 10.0]).unwrap();
        assert_eq!((s.mean, s.s2_unbiased), (10.0, Some(0.0)));

        let s = summarize(&[0.0, 1.0, 2.0]).unwrap();
        assert_eq!((s.mean, s.s2_unbiased), (1.0, Some(1.0)));

        let s = summarize(&[-1.0, 1.0]).unwrap();
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.s2_unbiased, Some(2.0));
        assert_eq!(s.s2_mle, Some(1.0));
    }

    #[test]
    fn edge_cases() {
        assert!(summarize(&[]).is_err());
        let one = summarize(&[3.5]).unwrap();
        assert_eq!(one.mean, 3.5);
        assert_eq!(one.s2_unbiased, None);
        assert_eq!(one.sd(), None);
    }

    #[test]
    fn running_matches_two_pass() {
        let xs = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        let mut r = RunningStats::new();
        assert_eq!(r.variance_unbiased(), None);
        xs.iter().for_each(|&x| r.push(x));
        let s = summarize(&xs).unwrap();
        assert_eq!(r.count(), 8);
        assert!((r.mean() - s.mean).abs() < 1e-12);
        assert!((r.variance_unbiased().unwrap() - s.s2_unbiased.unwrap()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn divisors_and_range(xs in prop::collection::vec(-1e3f64..1e3, 2..60)) {
            let s = summarize(&xs).unwrap();
            let n = xs.len() as f64;
            let (u, m) = (s.s2_unbiased.unwrap(), s.s2_mle.unwrap());
            prop_assert!(u >= 0.0 && m >= 0.0);
            prop_assert!((u - m * n / (n - 1.0)).abs() <= 1e-9 * (1.0 + u));
            let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo <= s.mean && s.mean <= hi);
        }

        #[test]
        fn location_scale_equivariance(
            xs in prop::collection::vec(-100f64..100.0, 2..40),
            shift in -1e3f64..1e3,
            scale in 0.01f64..100.0,
        ) {
            let base = summarize(&xs).unwrap();
            let shifted: Vec<f64> = xs.iter().map(|x| x + shift).collect();
            let scaled: Vec<f64> = xs.iter().map(|x| x * scale).collect();
            let s = summarize(&shifted).unwrap();
            let c = summarize(&scaled).unwrap();
            let v = base.s2_unbiased.unwrap();
            prop_assert!((s.mean - (base.mean + shift)).abs() <= 1e-9 * (1.0 + shift.abs()));
            prop_assert!((s.s2_unbiased.unwrap() - v).abs() <= 1e-7 * (1.0 + v));
            prop_assert!((c.mean - base.mean * scale).abs() <= 1e-9 * (1.0 + (base.mean * scale).abs()));
            prop_assert!((c.s2_unbiased.unwrap() - v * scale * scale).abs() <= 1e-9 * (1.0 + v * scale * scale));
        }
    }
}
