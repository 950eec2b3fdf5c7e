//! Perturbative analysis of resonant caustics in deformed circular billiards.

pub mod deformations;
pub mod error;
pub mod expansions;
pub mod fourier;
pub mod oracle;
pub mod persistence;

pub use error::{Error, Result};
pub use fourier::{RotationNumber, Tolerances, TrigPoly};
