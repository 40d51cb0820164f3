use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantile::normal_quantile;

/// How the first-stage sample size N₀ is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FirstStageRule {
    /// Scale N₀ by the standard deviation of three pilot observations.
    ThreeObservation,
    /// `max{N̄₀, ⌊(f·z/d)^{2/(1+γ)}⌋}`; needs no pilot data.
    GammaRule { gamma: f64, f: f64 },
}

impl FirstStageRule {
    /// The γ-rule with the customary `f = 1`.
    pub fn gamma(gamma: f64) -> Self {
        FirstStageRule::GammaRule { gamma, f: 1.0 }
    }
}

/// Parameters of a fixed-width procedure: the interval is `[μ̂ − d, μ̂ + d]`
/// with nominal coverage `1 − alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcedureConfig {
    pub alpha: f64,
    pub d: f64,
    pub n0_min: u64,
    pub first_stage_rule: FirstStageRule,
}

impl ProcedureConfig {
    pub fn new(alpha: f64, d: f64, n0_min: u64) -> Result<Self> {
        let config = ProcedureConfig {
            alpha,
            d,
            n0_min,
            first_stage_rule: FirstStageRule::ThreeObservation,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_first_stage_rule(mut self, rule: FirstStageRule) -> Result<Self> {
        self.first_stage_rule = rule;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        validate_alpha(self.alpha)?;
        validate_half_width(self.d)?;
        if self.n0_min < 2 {
            return Err(Error::domain(format!(
                "minimum first-stage size must be at least 2, got {}",
                self.n0_min
            )));
        }
        if let FirstStageRule::GammaRule { gamma, f } = self.first_stage_rule {
            if !(gamma > 0.0 && gamma.is_finite()) {
                return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
            }
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::domain(format!("f must be positive, got {f}")));
            }
        }
        Ok(())
    }

    /// `Φ⁻¹(1 − α/2)`.
    pub fn z(&self) -> f64 {
        two_sided_z(self.alpha).expect("validated alpha")
    }
}

pub(crate) fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

pub(crate) fn validate_half_width(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("half-width d must be positive, got {d}")))
    }
}

/// Two-sided normal critical value `Φ⁻¹(1 − α/2)`.
pub fn two_sided_z(alpha: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    normal_quantile(1.0 - alpha / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(ProcedureConfig::new(0.0, 0.1, 15).is_err());
        assert!(ProcedureConfig::new(1.0, 0.1, 15).is_err());
        assert!(ProcedureConfig::new(0.05, 0.0, 15).is_err());
        assert!(ProcedureConfig::new(0.05, -1.0, 15).is_err());
        assert!(ProcedureConfig::new(0.05, f64::NAN, 15).is_err());
        assert!(ProcedureConfig::new(0.05, 0.1, 1).is_err());
        let ok = ProcedureConfig::new(0.05, 0.1, 2).unwrap();
        assert!(ok.with_first_stage_rule(FirstStageRule::gamma(0.0)).is_err());
        assert!(ok
            .with_first_stage_rule(FirstStageRule::GammaRule { gamma: 1.0, f: -1.0 })
            .is_err());
        assert!(ok.with_first_stage_rule(FirstStageRule::gamma(0.5)).is_ok());
    }

    #[test]
    fn gamma_rule_defaults_f_to_one() {
        assert_eq!(
            FirstStageRule::gamma(2.0),
            FirstStageRule::GammaRule { gamma: 2.0, f: 1.0 }
        );
    }
}
