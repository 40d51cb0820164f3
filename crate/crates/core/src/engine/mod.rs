//! The two-stage protocol over a costed data source.
//!
//! With the three-observation rule a run issues at most three queries:
//!
//! 1. a pilot of three observations, used only to size the first stage;
//! 2. the first-stage sample of size `N₀`, which estimates the variance and
//!    fixes the final size `N̂_opt`;
//! 3. the `N̂_opt − N₀` top-up observations, skipped when `N̂_opt = N₀`.
//!
//! The point estimate pools stages one and two; pilot observations are
//! counted in `observations_used` but never enter an estimate.

pub mod source;

use serde::{Deserialize, Serialize};

use crate::config::{FirstStageRule, ProcedureConfig};
use crate::error::{Error, PartialReport, Result, Stage};
use crate::estimators::{common_mean, projection_estimate, projection_variance, ProjectionSpec, WeightSpec};
use crate::interval::FixedWidthInterval;
use crate::rules::{final_sample_size, first_stage_gamma, first_stage_three_obs};
use crate::summary::summarize;

pub use source::{DataSource, FetchError, QueryUsage, Synthetic, VecSource};

/// Size of the pilot sample of the three-observation rule.
pub const PILOT_SIZE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProcedureKind {
    UnivariateMean,
    Projection,
    CommonMean { weights: String },
}

/// Outcome of one two-stage run.
///
/// For the common mean, `n0` and `n_final` count rows, i.e. observations per
/// sample (the total is twice that), and `sigma2_hat_stage1` is the
/// per-sample variance `γ²s̃₁² + (1 − γ)²s̃₂²` that sizes the final stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStageReport {
    pub pilot_sd: Option<f64>,
    pub n0: u64,
    pub n_final: u64,
    pub point_estimate: f64,
    pub interval: FixedWidthInterval,
    pub sigma2_hat_stage1: f64,
    pub queries_used: u64,
    pub observations_used: u64,
    pub procedure_kind: ProcedureKind,
}

/// What differs between the three kinds of target.
trait Target<T> {
    fn kind(&self) -> ProcedureKind;
    /// Scale estimate from the three-observation pilot.
    fn pilot_sd(&self, pilot: &[T]) -> Result<f64>;
    /// Variance estimate that sizes the final stage.
    fn stage_one_variance(&self, sample: &[T]) -> Result<f64>;
    fn estimate(&self, sample: &[T]) -> Result<f64>;
}

struct Mean;

impl Target<f64> for Mean {
    fn kind(&self) -> ProcedureKind {
        ProcedureKind::UnivariateMean
    }

    fn pilot_sd(&self, pilot: &[f64]) -> Result<f64> {
        Ok(summarize(pilot)?.sd().expect("pilot has three observations"))
    }

    fn stage_one_variance(&self, sample: &[f64]) -> Result<f64> {
        summarize(sample)?
            .s2_unbiased
            .ok_or_else(|| Error::domain("first stage needs at least two observations"))
    }

    fn estimate(&self, sample: &[f64]) -> Result<f64> {
        Ok(summarize(sample)?.mean)
    }
}

struct Projected<'a>(&'a ProjectionSpec);

impl Projected<'_> {
    fn projections(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.iter().map(|r| self.0.project(r)).collect()
    }
}

impl Target<Vec<f64>> for Projected<'_> {
    fn kind(&self) -> ProcedureKind {
        ProcedureKind::Projection
    }

    fn pilot_sd(&self, pilot: &[Vec<f64>]) -> Result<f64> {
        Ok(summarize(&self.projections(pilot)?)?
            .sd()
            .expect("pilot has three observations"))
    }

    fn stage_one_variance(&self, sample: &[Vec<f64>]) -> Result<f64> {
        projection_variance(sample, self.0)
    }

    fn estimate(&self, sample: &[Vec<f64>]) -> Result<f64> {
        projection_estimate(sample, self.0)
    }
}

struct CommonMean<'a>(&'a WeightSpec);

fn unzip(rows: &[(f64, f64)]) -> (Vec<f64>, Vec<f64>) {
    rows.iter().copied().unzip()
}

impl Target<(f64, f64)> for CommonMean<'_> {
    fn kind(&self) -> ProcedureKind {
        ProcedureKind::CommonMean {
            weights: self.0.name().to_string(),
        }
    }

    /// Standard deviation of all six pilot values taken as one sample: a
    /// rough scale that does not depend on the weight scheme.
    fn pilot_sd(&self, pilot: &[(f64, f64)]) -> Result<f64> {
        let pooled: Vec<f64> = pilot.iter().flat_map(|&(a, b)| [a, b]).collect();
        Ok(summarize(&pooled)?.sd().expect("pilot has six values"))
    }

    fn stage_one_variance(&self, sample: &[(f64, f64)]) -> Result<f64> {
        let (a, b) = unzip(sample);
        Ok(common_mean(&a, &b, self.0)?.per_sample_variance())
    }

    fn estimate(&self, sample: &[(f64, f64)]) -> Result<f64> {
        let (a, b) = unzip(sample);
        Ok(common_mean(&a, &b, self.0)?.mu_hat)
    }
}

struct Progress {
    start: QueryUsage,
    partial: PartialReport,
}

impl Progress {
    fn fetch<S: DataSource>(&mut self, source: &mut S, n: u64, stage: Stage) -> Result<Vec<S::Item>> {
        self.partial.stage = stage;
        let requested = usize::try_from(n).map_err(|_| Error::domain("batch size overflows usize"))?;
        let result = source.fetch(requested);
        let now = source.usage();
        self.partial.queries_used = now.queries - self.start.queries;
        self.partial.observations_used = now.observations - self.start.observations;
        match result {
            Ok(batch) => Ok(batch),
            Err(FetchError::Exhausted { requested, available }) => Err(Error::RanOutOfData {
                requested,
                available,
                partial: Box::new(self.partial.clone()),
            }),
            Err(FetchError::EmptyBatch) => Err(Error::domain("empty batch requested")),
        }
    }
}

fn drive<S, K>(source: &mut S, target: &K, config: &ProcedureConfig) -> Result<TwoStageReport>
where
    S: DataSource,
    K: Target<S::Item>,
{
    config.validate()?;
    let mut progress = Progress {
        start: source.usage(),
        partial: PartialReport {
            stage: Stage::Pilot,
            pilot_sd: None,
            n0: None,
            n_final: None,
            queries_used: 0,
            observations_used: 0,
        },
    };

    let (pilot_sd, n0) = match config.first_stage_rule {
        FirstStageRule::ThreeObservation => {
            let pilot = progress.fetch(source, PILOT_SIZE as u64, Stage::Pilot)?;
            let sd = target.pilot_sd(&pilot)?;
            let n0 = first_stage_three_obs(sd, config.alpha, config.d, config.n0_min)?;
            (Some(sd), n0)
        }
        FirstStageRule::GammaRule { gamma, f } => (
            None,
            first_stage_gamma(f, gamma, config.alpha, config.d, config.n0_min)?,
        ),
    };
    progress.partial.pilot_sd = pilot_sd;
    progress.partial.n0 = Some(n0);

    let mut sample = progress.fetch(source, n0, Stage::StageOne)?;
    let sigma2_hat = target.stage_one_variance(&sample)?;
    let n_final = final_sample_size(sigma2_hat, n0, config.alpha, config.d)?;
    progress.partial.n_final = Some(n_final);

    if n_final > n0 {
        sample.extend(progress.fetch(source, n_final - n0, Stage::StageTwo)?);
    }
    let point_estimate = target.estimate(&sample)?;

    Ok(TwoStageReport {
        pilot_sd,
        n0,
        n_final,
        point_estimate,
        interval: FixedWidthInterval::new(point_estimate, config.d),
        sigma2_hat_stage1: sigma2_hat,
        queries_used: progress.partial.queries_used,
        observations_used: progress.partial.observations_used,
        procedure_kind: target.kind(),
    })
}

/// Fixed-width interval for the mean of a univariate stream. The first-stage
/// variance uses divisor `n − 1`.
pub fn run_univariate<S>(source: &mut S, config: &ProcedureConfig) -> Result<TwoStageReport>
where
    S: DataSource<Item = f64>,
{
    drive(source, &Mean, config)
}

/// Fixed-width interval for `w'μ` from a stream of p-vectors. The first-stage
/// variance of the projections uses divisor `n`.
pub fn run_projection<S>(source: &mut S, w: &ProjectionSpec, config: &ProcedureConfig) -> Result<TwoStageReport>
where
    S: DataSource<Item = Vec<f64>>,
{
    drive(source, &Projected(w), config)
}

/// Fixed-width interval for the common mean of two samples drawn in pairs,
/// so both samples always have the same size.
pub fn run_common_mean<S>(source: &mut S, weights: &WeightSpec, config: &ProcedureConfig) -> Result<TwoStageReport>
where
    S: DataSource<Item = (f64, f64)>,
{
    drive(source, &CommonMean(weights), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::n_opt_star;
    use crate::simulate::model::Model;

    fn config(alpha: f64, d: f64, n0_min: u64) -> ProcedureConfig {
        ProcedureConfig::new(alpha, d, n0_min).unwrap()
    }

    #[test]
    fn constant_source() {
        let mut src = VecSource::new(vec![10.0; 100]);
        let report = run_univariate(&mut src, &config(0.05, 0.3, 15)).unwrap();
        assert_eq!(report.pilot_sd, Some(0.0));
        assert_eq!((report.n0, report.n_final), (15, 15));
        assert_eq!(report.interval.lower, 9.7);
        assert_eq!(report.interval.upper, 10.3);
        assert_eq!(report.queries_used, 2);
        assert_eq!(report.observations_used, 18);
    }

    #[test]
    fn normal_source_envelope() {
        let cfg = config(0.05, 0.1, 15);
        let mut src = Synthetic::univariate(Model::Normal, 10.0, 2024);
        let report = run_univariate(&mut src, &cfg).unwrap();
        let star = n_opt_star(1.0, 0.05, 0.1).unwrap();
        assert!(report.n_final as f64 >= 0.5 * star && report.n_final as f64 <= 2.0 * star);
        assert_eq!(report.interval.half_width, 0.1);
        assert!((report.interval.width() - 0.2).abs() <= 4.0 * f64::EPSILON * 10.0);
        assert_eq!(report.queries_used, 3);
        assert_eq!(report.observations_used, 3 + report.n_final);
    }

    #[test]
    fn replay_is_bit_identical() {
        let cfg = config(0.05, 0.1, 15);
        let a = run_univariate(&mut Synthetic::univariate(Model::StudentT5, 10.0, 9), &cfg).unwrap();
        let b = run_univariate(&mut Synthetic::univariate(Model::StudentT5, 10.0, 9), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.point_estimate.to_bits(), b.point_estimate.to_bits());
    }

    #[test]
    fn gamma_rule_skips_pilot() {
        let cfg = config(0.05, 0.1, 2)
            .with_first_stage_rule(FirstStageRule::gamma(1.0))
            .unwrap();
        let report = run_univariate(&mut Synthetic::univariate(Model::Normal, 0.0, 1), &cfg).unwrap();
        assert_eq!(report.pilot_sd, None);
        assert_eq!(report.n0, 19);
        assert!(report.queries_used <= 2);
        assert_eq!(report.observations_used, report.n_final);
    }

    #[test]
    fn exhaustion_carries_partial_report() {
        let data: Vec<f64> = (0..30).map(|i| (i % 7) as f64).collect();
        let err = run_univariate(&mut VecSource::new(data), &config(0.05, 0.1, 15)).unwrap_err();
        match err {
            Error::RanOutOfData { partial, .. } => {
                assert_eq!(partial.stage, Stage::StageTwo);
                assert_eq!(partial.n0, Some(20));
                assert!(partial.n_final.unwrap() > 20);
                assert_eq!(partial.queries_used, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = run_univariate(&mut VecSource::new(vec![1.0, 2.0]), &config(0.05, 0.1, 15)).unwrap_err();
        assert!(matches!(err, Error::RanOutOfData { ref partial, .. } if partial.stage == Stage::Pilot));
    }

    #[test]
    fn projection_on_one_dimension() {
        let cfg = config(0.05, 0.2, 15);
        let w = ProjectionSpec::new(vec![1.0]).unwrap();
        let mut vectors = Synthetic::vector(Model::Normal, 10.0, 1, 77);
        let mut scalars = Synthetic::univariate(Model::Normal, 10.0, 77);
        let proj = run_projection(&mut vectors, &w, &cfg).unwrap();
        let uni = run_univariate(&mut scalars, &cfg).unwrap();
        assert_eq!(proj.pilot_sd, uni.pilot_sd);
        assert_eq!(proj.n0, uni.n0);
        let n0 = uni.n0 as f64;
        assert!((proj.sigma2_hat_stage1 - uni.sigma2_hat_stage1 * (n0 - 1.0) / n0).abs() < 1e-12);
        assert_eq!(proj.procedure_kind, ProcedureKind::Projection);
    }

    #[test]
    fn projection_constant_coordinate() {
        let rows: Vec<Vec<f64>> = (0..200).map(|i| vec![i as f64, 5.0]).collect();
        let w = ProjectionSpec::unit(2, 1).unwrap();
        let report = run_projection(&mut VecSource::new(rows), &w, &config(0.05, 0.1, 15)).unwrap();
        assert_eq!(report.n_final, report.n0);
        assert_eq!(report.point_estimate, 5.0);
    }

    #[test]
    fn projection_scale_invariance() {
        let cfg = config(0.05, 0.2, 15);
        let cfg2 = config(0.05, 0.4, 15);
        let w = ProjectionSpec::new(vec![0.5, -1.0, 2.0]).unwrap();
        let a = run_projection(&mut Synthetic::vector(Model::Uniform25, 1.0, 3, 5), &w, &cfg).unwrap();
        let b = run_projection(
            &mut Synthetic::vector(Model::Uniform25, 1.0, 3, 5),
            &w.scaled(2.0).unwrap(),
            &cfg2,
        )
        .unwrap();
        assert_eq!((a.n0, a.n_final), (b.n0, b.n_final));
    }

    #[test]
    fn projection_dimension_mismatch() {
        let w = ProjectionSpec::new(vec![1.0, 1.0]).unwrap();
        let err = run_projection(
            &mut Synthetic::vector(Model::Normal, 0.0, 3, 1),
            &w,
            &config(0.05, 0.2, 15),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { expected: 2, actual: 3 })));
    }

    #[test]
    fn common_mean_constant_columns() {
        let rows = vec![(4.0, 4.0); 50];
        let report = run_common_mean(
            &mut VecSource::new(rows),
            &WeightSpec::graybill_deal(),
            &config(0.05, 0.3, 10),
        )
        .unwrap();
        assert_eq!(report.point_estimate, 4.0);
        assert_eq!(report.n_final, report.n0);
        assert_eq!(
            report.procedure_kind,
            ProcedureKind::CommonMean { weights: "gd".into() }
        );
    }

    #[test]
    fn common_mean_with_unit_weight_is_first_column_mean() {
        let cfg = config(0.05, 0.2, 10);
        let one = WeightSpec::constant(1.0);
        let report = run_common_mean(&mut Synthetic::paired(Model::Normal, 10.0, 1.0, 0.5, 3), &one, &cfg).unwrap();
        let mut replay = Synthetic::paired(Model::Normal, 10.0, 1.0, 0.5, 3);
        let rows = replay.fetch(3 + report.n_final as usize).unwrap();
        let first: Vec<f64> = rows[3..].iter().map(|r| r.0).collect();
        assert_eq!(report.point_estimate, summarize(&first).unwrap().mean);
        // γ ≡ 1 leaves only the first sample's variance in the plug-in.
        let stage_one: Vec<f64> = rows[3..3 + report.n0 as usize].iter().map(|r| r.0).collect();
        let s2 = summarize(&stage_one).unwrap().s2_unbiased.unwrap();
        assert!((report.sigma2_hat_stage1 - s2).abs() < 1e-12);
    }
}
