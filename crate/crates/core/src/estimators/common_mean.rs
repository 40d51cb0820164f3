//! Common mean of two samples with equal means and possibly unequal
//! variances, estimated as a random convex combination
//! `μ̂ = γ·X̄₁ + (1 − γ)·X̄₂`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summary::summarize;

/// `(s̃₁², s̃₂², x̄₁, x̄₂) ↦ γ`. Must be free of side effects.
pub type WeightFn = dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync;

/// A pair of weight functions, one for `s̃₁² ≤ s̃₂²` and one for
/// `s̃₁² > s̃₂²`. Outputs are clamped to `[0, 1]`.
#[derive(Clone)]
pub struct WeightSpec {
    name: String,
    gamma_le: Arc<WeightFn>,
    gamma_gt: Arc<WeightFn>,
}

impl fmt::Debug for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSpec").field("name", &self.name).finish()
    }
}

impl WeightSpec {
    pub fn new<L, G>(name: impl Into<String>, gamma_le: L, gamma_gt: G) -> Self
    where
        L: Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        WeightSpec {
            name: name.into(),
            gamma_le: Arc::new(gamma_le),
            gamma_gt: Arc::new(gamma_gt),
        }
    }

    /// Graybill–Deal: inverse-variance weights.
    pub fn graybill_deal() -> Self {
        Self::new("gd", |a, b, _, _| gd_weight(a, b), |a, b, _, _| gd_weight(a, b))
    }

    /// Nair: Graybill–Deal while `s̃₁² ≤ s̃₂²`, equal weights otherwise.
    pub fn nair() -> Self {
        Self::new("nair", |a, b, _, _| nair_weight(a, b), |a, b, _, _| nair_weight(a, b))
    }

    /// Elfessi: Graybill–Deal while `s̃₁² ≤ s̃₂²`, swapped weights otherwise.
    pub fn elfessi() -> Self {
        Self::new(
            "elfessi",
            |a, b, _, _| elfessi_weight(a, b),
            |a, b, _, _| elfessi_weight(a, b),
        )
    }

    /// `γ ≡ value` on both branches.
    pub fn constant(value: f64) -> Self {
        Self::new(
            format!("constant({value})"),
            move |_, _, _, _| value,
            move |_, _, _, _| value,
        )
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "gd" | "graybill-deal" => Ok(Self::graybill_deal()),
            "nair" => Ok(Self::nair()),
            "elfessi" => Ok(Self::elfessi()),
            other => Err(Error::domain(format!("unknown weight scheme `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Evaluates the branch selected by the variance ordering, clamped to
    /// `[0, 1]`.
    pub fn evaluate(&self, s1t2: f64, s2t2: f64, xbar1: f64, xbar2: f64) -> Result<(f64, Branch)> {
        let (raw, branch) = if s1t2 <= s2t2 {
            ((self.gamma_le)(s1t2, s2t2, xbar1, xbar2), Branch::LE)
        } else {
            ((self.gamma_gt)(s1t2, s2t2, xbar1, xbar2), Branch::GT)
        };
        if raw.is_nan() {
            return Err(Error::domain(format!("weight scheme `{}` returned NaN", self.name)));
        }
        Ok((raw.clamp(0.0, 1.0), branch))
    }
}

/// `s̃₂² / (s̃₁² + s̃₂²)`, or `1/2` when both variances vanish.
pub fn gd_weight(s1t2: f64, s2t2: f64) -> f64 {
    let total = s1t2 + s2t2;
    if total == 0.0 {
        0.5
    } else {
        s2t2 / total
    }
}

pub fn nair_weight(s1t2: f64, s2t2: f64) -> f64 {
    if s1t2 <= s2t2 {
        gd_weight(s1t2, s2t2)
    } else {
        0.5
    }
}

pub fn elfessi_weight(s1t2: f64, s2t2: f64) -> f64 {
    if s1t2 <= s2t2 {
        gd_weight(s1t2, s2t2)
    } else {
        gd_weight(s2t2, s1t2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    LE,
    GT,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommonMeanEstimate {
    pub mu_hat: f64,
    pub gamma_used: f64,
    /// `2[γ²s̃₁² + (1 − γ)²s̃₂²]`, the asymptotic variance with the sample size
    /// counted over both samples.
    pub sigma2_mu_hat: f64,
    pub branch: Branch,
}

impl CommonMeanEstimate {
    /// Asymptotic variance per sample, `γ²s̃₁² + (1 − γ)²s̃₂²`.
    pub fn per_sample_variance(&self) -> f64 {
        self.sigma2_mu_hat / 2.0
    }
}

/// Common-mean estimate from two equally sized samples.
pub fn common_mean(sample1: &[f64], sample2: &[f64], weights: &WeightSpec) -> Result<CommonMeanEstimate> {
    if sample1.len() < 2 || sample2.len() < 2 {
        return Err(Error::domain("common mean needs at least two observations per sample"));
    }
    if sample1.len() != sample2.len() {
        return Err(Error::domain(format!(
            "common mean needs equal sample sizes, got {} and {}",
            sample1.len(),
            sample2.len()
        )));
    }
    let first = summarize(sample1)?;
    let second = summarize(sample2)?;
    let s1t2 = first.s2_unbiased.expect("n >= 2");
    let s2t2 = second.s2_unbiased.expect("n >= 2");
    let (gamma, branch) = weights.evaluate(s1t2, s2t2, first.mean, second.mean)?;

    let (lo, hi) = if first.mean <= second.mean {
        (first.mean, second.mean)
    } else {
        (second.mean, first.mean)
    };
    let mu_hat = (second.mean + gamma * (first.mean - second.mean)).clamp(lo, hi);
    let sigma2_mu_hat = 2.0 * (gamma * gamma * s1t2 + (1.0 - gamma) * (1.0 - gamma) * s2t2);

    Ok(CommonMeanEstimate {
        mu_hat,
        gamma_used: gamma,
        sigma2_mu_hat,
        branch,
    })
}
