use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Error distributions of the simulation designs, `X = μ + σ·ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// ε ~ N(0, 1)
    Normal,
    /// ε ~ t(5)
    StudentT5,
    /// ε ~ U(−2.5, 2.5)
    Uniform25,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Normal, Model::StudentT5, Model::Uniform25];

    /// Model number used in the tables and on the command line.
    pub fn id(self) -> u8 {
        match self {
            Model::Normal => 1,
            Model::StudentT5 => 2,
            Model::Uniform25 => 3,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Model::Normal),
            2 => Ok(Model::StudentT5),
            3 => Ok(Model::Uniform25),
            other => Err(Error::domain(format!("unknown model {other}; expected 1, 2 or 3"))),
        }
    }

    /// Variance of ε.
    pub fn variance(self) -> f64 {
        match self {
            Model::Normal => 1.0,
            Model::StudentT5 => 5.0 / 3.0,
            Model::Uniform25 => 25.0 / 12.0,
        }
    }

    pub fn noise(self) -> Noise {
        match self {
            Model::Normal => Noise::Normal,
            Model::StudentT5 => Noise::StudentT(StudentT::new(5.0).expect("df > 0")),
            Model::Uniform25 => Noise::Uniform(Uniform::new_inclusive(-2.5, 2.5).expect("finite range")),
        }
    }
}

/// A ready-to-draw error distribution.
#[derive(Debug, Clone, Copy)]
pub enum Noise {
    Normal,
    StudentT(StudentT<f64>),
    Uniform(Uniform<f64>),
}

impl Distribution<f64> for Noise {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Noise::Normal => rng.sample(StandardNormal),
            Noise::StudentT(t) => t.sample(rng),
            Noise::Uniform(u) => u.sample(rng),
        }
    }
}

/// `n` i.i.d. draws of `mu + sigma·ε`.
pub fn sample_model<R: Rng + ?Sized>(model: Model, mu: f64, sigma: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let noise = model.noise();
    (0..n).map(|_| mu + sigma * noise.sample(rng)).collect()
}
