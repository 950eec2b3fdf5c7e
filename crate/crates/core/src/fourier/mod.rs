//! Trigonometric polynomials and the shift/sum/difference/average operator
//! calculus attached to a rotation number.

mod operators;
mod poly;
mod rotation;

pub use operators::{apply_operator, invert_delta, invert_delta_affine, invert_delta_with, Operator};
pub use poly::TrigPoly;
pub use rotation::RotationNumber;

use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by the whole pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative pruning / "is zero" threshold against the largest coefficient.
    pub zero: f64,
    /// Absolute floor under which a coefficient is always treated as zero.
    pub abs_floor: f64,
    /// An order breaks when a resonant harmonic of `Q_k` exceeds
    /// `max(obstruction_rel * max|Q_k|, obstruction_abs)`.
    pub obstruction_rel: f64,
    pub obstruction_abs: f64,
    /// Hard cap on harmonic degrees.
    pub max_degree: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { zero: 1e-9, abs_floor: 1e-15, obstruction_rel: 1e-8, obstruction_abs: 1e-13, max_degree: 4096 }
    }
}

impl Tolerances {
    /// Threshold below which a coefficient of a polynomial with largest
    /// coefficient `scale` counts as zero.
    pub fn zero_threshold(&self, scale: f64) -> f64 {
        (self.zero * scale).max(self.abs_floor)
    }

    pub fn obstruction_threshold(&self, scale: f64) -> f64 {
        (self.obstruction_rel * scale).max(self.obstruction_abs)
    }
}
