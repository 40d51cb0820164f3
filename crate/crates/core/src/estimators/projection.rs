use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fixed projection vector `w`; the target is `w'μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSpec {
    w: Vec<f64>,
}

impl ProjectionSpec {
    /// Rejects empty, non-finite and all-zero vectors; a zero projection has
    /// zero variance and no meaningful interval.
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::domain("projection vector is empty"));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("projection vector has non-finite entries"));
        }
        if w.iter().all(|&v| v == 0.0) {
            return Err(Error::domain("projection vector is identically zero"));
        }
        Ok(ProjectionSpec { w })
    }

    pub fn unit(p: usize, j: usize) -> Result<Self> {
        if j >= p {
            return Err(Error::domain(format!("coordinate {j} out of range for dimension {p}")));
        }
        let mut w = vec![0.0; p];
        w[j] = 1.0;
        Self::new(w)
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// `w'x` for a single observation.
    pub fn project(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::DimensionMismatch {
                expected: self.w.len(),
                actual: x.len(),
            });
        }
        Ok(self.w.iter().zip(x).map(|(w, x)| w * x).sum())
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.w.iter().map(|w| w * c).collect())
    }
}

fn column_means(rows: &[Vec<f64>], p: usize) -> Result<Vec<f64>> {
    let mut sums = vec![0.0; p];
    for row in rows {
        if row.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                actual: row.len(),
            });
        }
        sums.iter_mut().zip(row).for_each(|(s, x)| *s += x);
    }
    let n = rows.len() as f64;
    Ok(sums.into_iter().map(|s| s / n).collect())
}

/// `T_n = w'X̄_n`, the projection of the column means.
pub fn projection_estimate(rows: &[Vec<f64>], spec: &ProjectionSpec) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::domain("projection estimate needs at least one row"));
    }
    spec.project(&column_means(rows, spec.dim())?)
}

/// `(1/n) Σ (w'X_i − w'X̄)²`. Divisor `n`, not `n − 1`.
pub fn projection_variance(rows: &[Vec<f64>], spec: &ProjectionSpec) -> Result<f64> {
    if rows.len() < 2 {
        return Err(Error::domain("projection variance needs at least two rows"));
    }
    let center = projection_estimate(rows, spec)?;
    let mut ss = 0.0;
    for row in rows {
        let dev = spec.project(row)? - center;
        ss += dev * dev;
    }
    Ok(ss / rows.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summary::summarize;

    fn matrix() -> Vec<Vec<f64>> {
        vec![
            vec![1.0, 4.0, -2.0],
            vec![0.5, 3.0, 0.0],
            vec![2.0, 5.5, -1.0],
            vec![1.5, 2.0, 3.0],
            vec![-0.5, 4.5, 1.0],
        ]
    }

    #[test]
    fn rejects_degenerate_vectors() {
        assert!(ProjectionSpec::new(vec![]).is_err());
        assert!(ProjectionSpec::new(vec![0.0, 0.0, 0.0]).is_err());
        assert!(ProjectionSpec::new(vec![1.0, f64::NAN]).is_err());
        assert!(ProjectionSpec::unit(3, 3).is_err());
    }

    #[test]
    fn unit_vector_is_column_mean() {
        let x = matrix();
        let col: Vec<f64> = x.iter().map(|r| r[1]).collect();
        let stats = summarize(&col).unwrap();
        let w = ProjectionSpec::unit(3, 1).unwrap();
        assert!((projection_estimate(&x, &w).unwrap() - stats.mean).abs() < 1e-12);
        assert!((projection_variance(&x, &w).unwrap() - stats.s2_mle.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn sum_of_column_means() {
        let x = matrix();
        let w = ProjectionSpec::new(vec![1.0, 1.0, 1.0]).unwrap();
        let expected: f64 = (0..3).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / 5.0).sum();
        assert!((projection_estimate(&x, &w).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn constant_rows() {
        let v = vec![2.0, -1.0, 0.5];
        let x = vec![v.clone(); 6];
        let w = ProjectionSpec::new(vec![0.3, 2.0, -4.0]).unwrap();
        let wv = w.project(&v).unwrap();
        assert!((projection_estimate(&x, &w).unwrap() - wv).abs() < 1e-12);
        assert!(projection_variance(&x, &w).unwrap().abs() < 1e-24);
    }

    #[test]
    fn two_rows() {
        let x = vec![vec![3.0], vec![8.0]];
        let w = ProjectionSpec::new(vec![1.0]).unwrap();
        assert_eq!(projection_variance(&x, &w).unwrap(), 25.0 / 4.0);
    }

    #[test]
    fn errors() {
        let w = ProjectionSpec::new(vec![1.0, 1.0]).unwrap();
        assert!(projection_variance(&[vec![1.0, 2.0]], &w).is_err());
        assert!(projection_estimate(&[], &w).is_err());
        assert!(matches!(
            projection_estimate(&[vec![1.0, 2.0, 3.0]], &w),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        ));
    }
}
