use serde::{Deserialize, Serialize};

/// `[center − half_width, center + half_width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedWidthInterval {
    pub center: f64,
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
}

impl FixedWidthInterval {
    pub fn new(center: f64, half_width: f64) -> Self {
        FixedWidthInterval {
            center,
            half_width,
            lower: center - half_width,
            upper: center + half_width,
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}
