//! Monte Carlo harness: coverage and sample-size behaviour of the two-stage
//! procedure over many seeded replications.
//!
//! Each cell mixes the root seed with its own parameters into a cell seed;
//! replication `i` then draws from ChaCha8 stream `i` of that seed. Results
//! do not depend on scheduling, distinct cells are independent, and a cell
//! built by hand reproduces the matching table cell under the same root seed.

pub mod model;
pub mod tables;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{FirstStageRule, ProcedureConfig};
use crate::engine::{run_common_mean, run_projection, run_univariate, Synthetic, TwoStageReport, PILOT_SIZE};
use crate::error::{Error, Result};
use crate::estimators::{gd_weight, ProjectionSpec, WeightSpec};
use crate::rules::n_opt_star;

pub use model::{sample_model, Model};

/// True mean used by the simulation designs.
pub const DEFAULT_MU0: f64 = 10.0;
pub const DEFAULT_REPLICATIONS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CellKind {
    UnivariateMean,
    /// i.i.d. coordinates; the target is `w'(μ₀, …, μ₀)`.
    Projection {
        w: Vec<f64>,
    },
    /// `X_i = μ₀ + σ_i·ε`, drawn in pairs.
    CommonMean {
        sigma1: f64,
        sigma2: f64,
        weights: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentCell {
    pub kind: CellKind,
    pub model: Model,
    pub mu0: f64,
    pub alpha: f64,
    pub d: f64,
    pub n0_min: u64,
    pub first_stage_rule: FirstStageRule,
    pub replications: u64,
    pub seed: u64,
}

impl ExperimentCell {
    pub fn univariate(model: Model, alpha: f64, d: f64, n0_min: u64) -> Self {
        ExperimentCell {
            kind: CellKind::UnivariateMean,
            model,
            mu0: DEFAULT_MU0,
            alpha,
            d,
            n0_min,
            first_stage_rule: FirstStageRule::ThreeObservation,
            replications: DEFAULT_REPLICATIONS,
            seed: 1,
        }
    }

    /// Graybill–Deal common mean with `σ₁ = 1`.
    pub fn common_mean(model: Model, sigma2: f64, alpha: f64, d: f64, n0_min: u64) -> Self {
        ExperimentCell {
            kind: CellKind::CommonMean {
                sigma1: 1.0,
                sigma2,
                weights: "gd".into(),
            },
            ..Self::univariate(model, alpha, d, n0_min)
        }
    }

    pub fn with_replications(mut self, replications: u64) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn config(&self) -> Result<ProcedureConfig> {
        ProcedureConfig::new(self.alpha, self.d, self.n0_min)?.with_first_stage_rule(self.first_stage_rule)
    }

    /// The estimand: μ₀, or `w'(μ₀, …, μ₀)` for projections.
    pub fn target(&self) -> f64 {
        match &self.kind {
            CellKind::Projection { w } => self.mu0 * w.iter().sum::<f64>(),
            _ => self.mu0,
        }
    }

    /// Asymptotic variance on the scale of the sample-size rule.
    pub fn true_variance(&self) -> f64 {
        let var = self.model.variance();
        match &self.kind {
            CellKind::UnivariateMean => var,
            CellKind::Projection { w } => var * w.iter().map(|x| x * x).sum::<f64>(),
            CellKind::CommonMean { sigma1, sigma2, .. } => {
                let (v1, v2) = (sigma1 * sigma1 * var, sigma2 * sigma2 * var);
                let g = gd_weight(v1, v2);
                g * g * v1 + (1.0 - g) * (1.0 - g) * v2
            }
        }
    }

    fn pilot_counted(&self) -> bool {
        self.first_stage_rule == FirstStageRule::ThreeObservation && !matches!(self.kind, CellKind::CommonMean { .. })
    }

    fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::domain("a cell needs at least one replication"));
        }
        if let CellKind::CommonMean {
            sigma1,
            sigma2,
            weights,
        } = &self.kind
        {
            if !(*sigma1 >= 0.0 && *sigma2 >= 0.0) {
                return Err(Error::domain("sample scales must be nonnegative"));
            }
            WeightSpec::by_name(weights)?;
        }
        if let CellKind::Projection { w } = &self.kind {
            ProjectionSpec::new(w.clone())?;
        }
        self.config().map(|_| ())
    }

    /// Seed of this cell's random streams, derived from the root seed and
    /// every parameter that defines the cell except the replication count.
    pub fn stream_seed(&self) -> u64 {
        let mut h = StreamKey::new(self.seed);
        match &self.kind {
            CellKind::UnivariateMean => h.push(1),
            CellKind::Projection { w } => {
                h.push(2);
                w.iter().for_each(|x| h.push(x.to_bits()));
            }
            CellKind::CommonMean {
                sigma1,
                sigma2,
                weights,
            } => {
                h.push(3);
                h.push(sigma1.to_bits());
                h.push(sigma2.to_bits());
                weights.bytes().for_each(|b| h.push(b as u64));
            }
        }
        h.push(self.model.id() as u64);
        h.push(self.mu0.to_bits());
        h.push(self.alpha.to_bits());
        h.push(self.d.to_bits());
        h.push(self.n0_min);
        match self.first_stage_rule {
            FirstStageRule::ThreeObservation => h.push(0),
            FirstStageRule::GammaRule { gamma, f } => {
                h.push(gamma.to_bits());
                h.push(f.to_bits());
            }
        }
        h.finish()
    }

    fn run_replication(&self, index: u64) -> Result<TwoStageReport> {
        let config = self.config()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.stream_seed());
        rng.set_stream(index);
        match &self.kind {
            CellKind::UnivariateMean => {
                run_univariate(&mut Synthetic::univariate_from(self.model, self.mu0, rng), &config)
            }
            CellKind::Projection { w } => {
                let spec = ProjectionSpec::new(w.clone())?;
                let mut src = Synthetic::vector_from(self.model, self.mu0, w.len(), rng);
                run_projection(&mut src, &spec, &config)
            }
            CellKind::CommonMean {
                sigma1,
                sigma2,
                weights,
            } => {
                let spec = WeightSpec::by_name(weights)?;
                let mut src = Synthetic::paired_from(self.model, self.mu0, *sigma1, *sigma2, rng);
                run_common_mean(&mut src, &spec, &config)
            }
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive, platform-independent fold of 64-bit words.
struct StreamKey(u64);

impl StreamKey {
    fn new(seed: u64) -> Self {
        StreamKey(splitmix64(seed))
    }

    fn push(&mut self, word: u64) {
        self.0 = splitmix64(self.0 ^ splitmix64(word));
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// Reference optimum the over/undershoot is measured against.
///
/// Mean and projection cells with the three-observation rule count the pilot:
/// `⌊σ²z²/d²⌋ + 3`. Common-mean cells use the raw per-sample optimum
/// `[γ*²σ₁² + (1 − γ*)²σ₂²]·z²/d²` with `γ* = σ₂²/(σ₁² + σ₂²)`. Without a
/// pilot the raw optimum is used throughout.
pub fn reference_optimum(cell: &ExperimentCell) -> Result<f64> {
    let star = n_opt_star(cell.true_variance(), cell.alpha, cell.d)?;
    Ok(if cell.pilot_counted() {
        star.floor() + PILOT_SIZE as f64
    } else {
        star
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub cell: ExperimentCell,
    /// Fraction of intervals containing the true value.
    pub coverage_p: f64,
    /// Average reported size: pilot included for mean and projection cells,
    /// per sample and without pilot for common-mean cells.
    pub mean_n: f64,
    pub over_under: f64,
    pub mc_se_p: f64,
    pub mc_se_n: f64,
    pub reference: f64,
    /// Average final-stage size `N̂_opt`, never including the pilot.
    pub mean_n_final: f64,
    pub n_opt_star: f64,
}

impl SimulationResult {
    pub fn size_ratio(&self) -> f64 {
        self.mean_n / self.reference
    }

    /// `E(N̂_opt)/N*_opt`.
    pub fn efficiency_ratio(&self) -> f64 {
        self.mean_n_final / self.n_opt_star
    }

    /// Nominal confidence level `1 − α`.
    pub fn level(&self) -> f64 {
        1.0 - self.cell.alpha
    }
}

/// Runs every replication of a cell; fails if any replication fails.
pub fn run_cell(cell: &ExperimentCell) -> Result<SimulationResult> {
    cell.validate()?;
    let target = cell.target();
    let pilot = if cell.pilot_counted() { PILOT_SIZE as u64 } else { 0 };
    let outcomes: Vec<(bool, u64)> = (0..cell.replications)
        .into_par_iter()
        .map(|i| {
            cell.run_replication(i)
                .map(|r| (r.interval.contains(target), r.n_final))
                .map_err(|e| Error::Replication {
                    replication: i,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;

    // Index-ordered reduction keeps the sums bit-stable.
    let reps = cell.replications as f64;
    let covered = outcomes.iter().filter(|(c, _)| *c).count() as f64;
    let coverage_p = covered / reps;
    let mean_n_final = outcomes.iter().map(|&(_, n)| n as f64).sum::<f64>() / reps;
    let mean_n = mean_n_final + pilot as f64;
    let var_n = if outcomes.len() > 1 {
        outcomes
            .iter()
            .map(|&(_, n)| (n as f64 - mean_n_final).powi(2))
            .sum::<f64>()
            / (reps - 1.0)
    } else {
        0.0
    };
    let reference = reference_optimum(cell)?;

    Ok(SimulationResult {
        cell: cell.clone(),
        coverage_p,
        mean_n,
        over_under: mean_n - reference,
        mc_se_p: (coverage_p * (1.0 - coverage_p) / reps).sqrt(),
        mc_se_n: (var_n / reps).sqrt(),
        reference,
        mean_n_final,
        n_opt_star: n_opt_star(cell.true_variance(), cell.alpha, cell.d)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Sweep {
    /// `d → 0` at fixed α; the grid lists half-widths.
    HighAccuracy(Vec<f64>),
    /// `α → 0` at fixed d; the grid lists error probabilities.
    HighConfidence(Vec<f64>),
}

/// Runs `base` once per grid point, varying `d` or `α`.
pub fn asymptotics_sweep(sweep: &Sweep, base: &ExperimentCell) -> Result<Vec<SimulationResult>> {
    let cells: Vec<ExperimentCell> = match sweep {
        Sweep::HighAccuracy(ds) => ds.iter().map(|&d| ExperimentCell { d, ..base.clone() }).collect(),
        Sweep::HighConfidence(alphas) => alphas
            .iter()
            .map(|&alpha| ExperimentCell { alpha, ..base.clone() })
            .collect(),
    };
    cells.iter().map(run_cell).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_conventions() {
        let cell = ExperimentCell::univariate(Model::Normal, 0.05, 0.3, 15);
        assert_eq!(reference_optimum(&cell).unwrap(), 45.0);
        let cell = ExperimentCell::univariate(Model::StudentT5, 0.05, 0.2, 15);
        assert_eq!(reference_optimum(&cell).unwrap(), 163.0);
        let cell = ExperimentCell::common_mean(Model::Normal, 1.0, 0.05, 0.05, 10);
        assert!((reference_optimum(&cell).unwrap() - 768.29).abs() < 0.01);
        let cell = ExperimentCell::common_mean(Model::Normal, 0.5, 0.05, 0.3, 10);
        assert!((reference_optimum(&cell).unwrap() - 8.54).abs() < 0.01);
        let cell = ExperimentCell::common_mean(Model::Normal, 1.0, 0.05, 0.3, 10);
        assert!((reference_optimum(&cell).unwrap() - 21.34).abs() < 0.01);
    }

    #[test]
    fn model_variances() {
        assert_eq!(Model::Normal.variance(), 1.0);
        assert_eq!(Model::StudentT5.variance(), 5.0 / 3.0);
        assert_eq!(Model::Uniform25.variance(), 25.0 / 12.0);
    }

    #[test]
    fn small_cell_is_deterministic() {
        let cell = ExperimentCell::univariate(Model::StudentT5, 0.05, 0.3, 15)
            .with_replications(200)
            .with_seed(4);
        let a = run_cell(&cell).unwrap();
        let b = run_cell(&cell).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean_n.to_bits(), b.mean_n.to_bits());
        assert!((0.0..=1.0).contains(&a.coverage_p));
        let se = (a.coverage_p * (1.0 - a.coverage_p) / 200.0).sqrt();
        assert_eq!(a.mc_se_p, se);
        assert_eq!(a.mean_n, a.mean_n_final + 3.0);
    }

    #[test]
    fn cells_get_distinct_streams() {
        let a = ExperimentCell::univariate(Model::Normal, 0.05, 0.3, 15);
        let b = ExperimentCell::univariate(Model::Normal, 0.05, 0.3, 30);
        let c = a.clone().with_replications(5);
        assert_ne!(a.stream_seed(), b.stream_seed());
        assert_eq!(a.stream_seed(), c.stream_seed());
        assert_ne!(a.stream_seed(), a.clone().with_seed(2).stream_seed());
    }

    #[test]
    fn single_point_sweep_matches_cell() {
        let cell = ExperimentCell::univariate(Model::Normal, 0.05, 0.3, 15).with_replications(100);
        let swept = asymptotics_sweep(&Sweep::HighAccuracy(vec![0.3]), &cell).unwrap();
        assert_eq!(swept, vec![run_cell(&cell).unwrap()]);
    }

    #[test]
    fn projection_cell() {
        let cell = ExperimentCell {
            kind: CellKind::Projection { w: vec![1.0, -0.5] },
            ..ExperimentCell::univariate(Model::Normal, 0.05, 0.3, 15).with_replications(300)
        };
        assert_eq!(cell.target(), 5.0);
        let res = run_cell(&cell).unwrap();
        assert!(res.coverage_p > 0.85, "{}", res.coverage_p);
    }

    #[test]
    fn invalid_cells() {
        let cell = ExperimentCell::univariate(Model::Normal, 0.05, 0.3, 15).with_replications(0);
        assert!(run_cell(&cell).is_err());
        let mut cell = ExperimentCell::common_mean(Model::Normal, 1.0, 0.05, 0.3, 10);
        if let CellKind::CommonMean { weights, .. } = &mut cell.kind {
            *weights = "nope".into();
        }
        assert!(run_cell(&cell).is_err());
    }
}
