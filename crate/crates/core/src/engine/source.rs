//! Batched observation suppliers with query accounting.
//!
//! Every call to [`DataSource::fetch`] is one query, however many
//! observations it asks for. Sources are streams: observations are handed out
//! once, in order.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::simulate::model::Model;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryUsage {
    pub queries: u64,
    pub observations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum FetchError {
    #[error("requested {requested} observations, {available} left")]
    Exhausted { requested: usize, available: usize },
    #[error("batch size must be positive")]
    EmptyBatch,
}

pub trait DataSource {
    type Item;

    /// One query returning exactly `batch_size` fresh observations.
    fn fetch(&mut self, batch_size: usize) -> Result<Vec<Self::Item>, FetchError>;

    fn usage(&self) -> QueryUsage;
}

impl<S: DataSource + ?Sized> DataSource for &mut S {
    type Item = S::Item;

    fn fetch(&mut self, batch_size: usize) -> Result<Vec<Self::Item>, FetchError> {
        (**self).fetch(batch_size)
    }

    fn usage(&self) -> QueryUsage {
        (**self).usage()
    }
}

/// Finite in-memory stream, e.g. a loaded file.
#[derive(Debug, Clone)]
pub struct VecSource<T> {
    items: Vec<T>,
    cursor: usize,
    usage: QueryUsage,
}

impl<T: Clone> VecSource<T> {
    pub fn new(items: Vec<T>) -> Self {
        VecSource {
            items,
            cursor: 0,
            usage: QueryUsage::default(),
        }
    }

    pub fn remaining(&self) -> usize {
        self.items.len() - self.cursor
    }
}

impl<T: Clone> DataSource for VecSource<T> {
    type Item = T;

    fn fetch(&mut self, batch_size: usize) -> Result<Vec<T>, FetchError> {
        if batch_size == 0 {
            return Err(FetchError::EmptyBatch);
        }
        self.usage.queries += 1;
        if batch_size > self.remaining() {
            return Err(FetchError::Exhausted {
                requested: batch_size,
                available: self.remaining(),
            });
        }
        let batch = self.items[self.cursor..self.cursor + batch_size].to_vec();
        self.cursor += batch_size;
        self.usage.observations += batch_size as u64;
        Ok(batch)
    }

    fn usage(&self) -> QueryUsage {
        self.usage
    }
}

type Draw<T> = Box<dyn FnMut(&mut ChaCha8Rng) -> T + Send>;

/// Unbounded seeded stream from one of the simulation models.
pub struct Synthetic<T> {
    rng: ChaCha8Rng,
    draw: Draw<T>,
    usage: QueryUsage,
}

impl<T> Synthetic<T> {
    pub fn with_rng(rng: ChaCha8Rng, draw: impl FnMut(&mut ChaCha8Rng) -> T + Send + 'static) -> Self {
        Synthetic {
            rng,
            draw: Box::new(draw),
            usage: QueryUsage::default(),
        }
    }
}

impl Synthetic<f64> {
    /// `mu + ε`.
    pub fn univariate(model: Model, mu: f64, seed: u64) -> Self {
        Self::univariate_from(model, mu, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn univariate_from(model: Model, mu: f64, rng: ChaCha8Rng) -> Self {
        let noise = model.noise();
        Self::with_rng(rng, move |rng| mu + noise.sample(rng))
    }
}

impl Synthetic<Vec<f64>> {
    /// p-vectors with i.i.d. coordinates `mu + ε`.
    pub fn vector(model: Model, mu: f64, p: usize, seed: u64) -> Self {
        Self::vector_from(model, mu, p, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn vector_from(model: Model, mu: f64, p: usize, rng: ChaCha8Rng) -> Self {
        let noise = model.noise();
        Self::with_rng(rng, move |rng| (0..p).map(|_| mu + noise.sample(rng)).collect())
    }
}

impl Synthetic<(f64, f64)> {
    /// Paired rows `(mu + σ₁ε₁, mu + σ₂ε₂)` with independent errors.
    pub fn paired(model: Model, mu: f64, sigma1: f64, sigma2: f64, seed: u64) -> Self {
        Self::paired_from(model, mu, sigma1, sigma2, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn paired_from(model: Model, mu: f64, sigma1: f64, sigma2: f64, rng: ChaCha8Rng) -> Self {
        let noise = model.noise();
        Self::with_rng(rng, move |rng| {
            let a = mu + sigma1 * rng.sample(noise);
            let b = mu + sigma2 * rng.sample(noise);
            (a, b)
        })
    }
}

impl<T> DataSource for Synthetic<T> {
    type Item = T;

    fn fetch(&mut self, batch_size: usize) -> Result<Vec<T>, FetchError> {
        if batch_size == 0 {
            return Err(FetchError::EmptyBatch);
        }
        self.usage.queries += 1;
        self.usage.observations += batch_size as u64;
        let draw = &mut self.draw;
        let rng = &mut self.rng;
        Ok((0..batch_size).map(|_| draw(rng)).collect())
    }

    fn usage(&self) -> QueryUsage {
        self.usage
    }
}

/// Numeric rows of a comma-separated file. A first row that does not parse
/// as numbers is taken as a header and skipped.
pub fn read_csv_rows<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(None)
        .flexible(true)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (idx, record) in csv.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(idx as u64 + 1, |p| p.line());
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(values) if values.iter().all(|v| v.is_finite()) => rows.push(values),
            Ok(_) => {
                return Err(Error::Parse {
                    line,
                    message: "non-finite value".into(),
                })
            }
            Err(_) if idx == 0 => continue,
            Err(e) => {
                return Err(Error::Parse {
                    line,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(rows)
}

fn rows_with_width<R: Read>(reader: R, width: usize) -> Result<Vec<Vec<f64>>> {
    let rows = read_csv_rows(reader)?;
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(Error::Parse {
            line: i as u64 + 1,
            message: format!("expected {width} columns, found {}", row.len()),
        });
    }
    Ok(rows)
}

impl VecSource<f64> {
    /// One observation per row.
    pub fn univariate_csv<R: Read>(reader: R) -> Result<Self> {
        let rows = rows_with_width(reader, 1)?;
        Ok(Self::new(rows.into_iter().map(|r| r[0]).collect()))
    }

    pub fn univariate_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::univariate_csv(File::open(path)?)
    }
}

impl VecSource<Vec<f64>> {
    /// `p` comma-separated reals per row.
    pub fn vector_csv<R: Read>(reader: R, p: usize) -> Result<Self> {
        Ok(Self::new(rows_with_width(reader, p)?))
    }

    pub fn vector_csv_file(path: impl AsRef<Path>, p: usize) -> Result<Self> {
        Self::vector_csv(File::open(path)?, p)
    }
}

impl VecSource<(f64, f64)> {
    /// Two reals per row, one from each sample.
    pub fn paired_csv<R: Read>(reader: R) -> Result<Self> {
        let rows = rows_with_width(reader, 2)?;
        Ok(Self::new(rows.into_iter().map(|r| (r[0], r[1])).collect()))
    }

    pub fn paired_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::paired_csv(File::open(path)?)
    }
}
