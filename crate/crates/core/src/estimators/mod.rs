//! Point and variance estimators for the three kinds of target: a plain mean,
//! a linear projection of a vector mean, and the common mean of two samples.

pub mod common_mean;
pub mod projection;

pub use common_mean::{common_mean, elfessi_weight, gd_weight, nair_weight, Branch, CommonMeanEstimate, WeightSpec};
pub use projection::{projection_estimate, projection_variance, ProjectionSpec};
