//! Normal and Student-t quantiles.
//!
//! The normal quantile is Wichura's AS 241 (PPND16), a piecewise rational
//! approximation with relative error around 1e-16 over the whole open unit
//! interval.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

const SPLIT1: f64 = 0.425;
const SPLIT2: f64 = 5.0;
const CONST1: f64 = 0.180625;
const CONST2: f64 = 1.6;

// Central region, |p - 0.5| <= 0.425.
#[allow(clippy::excessive_precision)]
const A: [f64; 8] = [
    3.387_132_872_796_366_608_0e0,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
#[allow(clippy::excessive_precision)]
const B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083_0e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061_0e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561_0e3,
];

// Intermediate tail, sqrt(-ln q) <= 5.
#[allow(clippy::excessive_precision)]
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34e0,
    4.630_337_846_156_545_295_90e0,
    5.769_497_221_460_691_405_50e0,
    3.647_848_324_763_204_605_04e0,
    1.270_458_252_452_368_382_58e0,
    2.417_807_251_774_506_117_70e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_40e-4,
];
#[allow(clippy::excessive_precision)]
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87e0,
    1.676_384_830_183_803_849_40e0,
    6.897_673_349_851_000_045_50e-1,
    1.481_039_764_274_800_745_90e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946_00e-4,
    1.050_750_071_644_416_843_24e-9,
];

// Far tail.
#[allow(clippy::excessive_precision)]
const E: [f64; 8] = [
    6.657_904_643_501_103_777_20e0,
    5.463_784_911_164_114_369_90e0,
    1.784_826_539_917_291_335_80e0,
    2.965_605_718_285_048_912_30e-1,
    2.653_218_952_657_612_309_30e-2,
    1.242_660_947_388_078_438_60e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
#[allow(clippy::excessive_precision)]
const F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_90e-1,
    1.369_298_809_227_358_053_10e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591_00e-4,
    1.846_318_317_510_054_681_80e-5,
    1.421_511_758_316_445_888_70e-7,
    2.044_263_103_389_939_785_64e-15,
];

fn poly(coeffs: &[f64; 8], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Standard normal quantile `Φ⁻¹(p)` for `p` in the open unit interval.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("probability must lie in (0, 1), got {p}")));
    }
    let q = p - 0.5;
    if q.abs() <= SPLIT1 {
        let r = CONST1 - q * q;
        return Ok(q * poly(&A, r) / poly(&B, r));
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let r = (-tail.ln()).sqrt();
    let z = if r <= SPLIT2 {
        let r = r - CONST2;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - SPLIT2;
        poly(&E, r) / poly(&F, r)
    };
    Ok(if q < 0.0 { -z } else { z })
}

/// Supplies Student-t quantiles to the classical reference rules.
pub trait TQuantile {
    /// Quantile of order `p` of the t distribution with `df` degrees of freedom.
    fn t_quantile(&self, df: u64, p: f64) -> Result<f64>;
}

impl<F> TQuantile for F
where
    F: Fn(u64, f64) -> Result<f64>,
{
    fn t_quantile(&self, df: u64, p: f64) -> Result<f64> {
        self(df, p)
    }
}

/// Default provider: exact t quantiles up to `normal_cutoff` degrees of
/// freedom, the normal quantile beyond.
#[derive(Debug, Clone, Copy)]
pub struct StudentTQuantiles {
    pub normal_cutoff: u64,
}

impl Default for StudentTQuantiles {
    fn default() -> Self {
        StudentTQuantiles { normal_cutoff: 200 }
    }
}

impl TQuantile for StudentTQuantiles {
    fn t_quantile(&self, df: u64, p: f64) -> Result<f64> {
        if df == 0 {
            return Err(Error::domain("t quantile needs at least one degree of freedom"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("probability must lie in (0, 1), got {p}")));
        }
        if df > self.normal_cutoff {
            return normal_quantile(p);
        }
        let dist = StudentsT::new(0.0, 1.0, df as f64).map_err(|e| Error::domain(format!("t distribution: {e}")))?;
        Ok(dist.inverse_cdf(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::erf::erfc;

    fn phi(z: f64) -> f64 {
        0.5 * erfc(-z / std::f64::consts::SQRT_2)
    }

    #[test]
    fn reference_values() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        assert!((normal_quantile(0.975).unwrap() - 1.959964).abs() < 1e-6);
        assert!((normal_quantile(0.995).unwrap() - 2.575829).abs() < 1e-6);
    }

    #[test]
    fn domain_errors() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(normal_quantile(p).is_err(), "p = {p}");
        }
    }

    #[test]
    fn antisymmetric_and_increasing() {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let z = normal_quantile(p).unwrap();
            assert!(z > prev, "not increasing at p = {p}");
            prev = z;
            let mirrored = normal_quantile(1.0 - p).unwrap();
            assert!((z + mirrored).abs() < 1e-12, "asymmetric at p = {p}");
        }
    }

    #[test]
    fn cdf_round_trip() {
        for &p in &[1e-6, 1e-4, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0 - 1e-6] {
            let z = normal_quantile(p).unwrap();
            assert!((phi(z) - p).abs() <= 1e-8 * p.max(1e-2), "p = {p}");
        }
    }

    #[test]
    fn t_quantiles() {
        let t = StudentTQuantiles::default();
        assert!((t.t_quantile(14, 0.975).unwrap() - 2.144787).abs() < 1e-5);
        assert!((t.t_quantile(29, 0.995).unwrap() - 2.756386).abs() < 1e-5);
        assert_eq!(t.t_quantile(500, 0.975).unwrap(), normal_quantile(0.975).unwrap());
        assert!(t.t_quantile(0, 0.975).is_err());
    }
}
