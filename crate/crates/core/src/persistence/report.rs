use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::fourier::{RotationNumber, TrigPoly};

/// A resonant harmonic `l ∈ qZ*` of `h_k + ζ_k` that blocks order `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstruction {
    pub k: usize,
    pub l: i64,
    pub amplitude: Complex64,
}

impl Serialize for Obstruction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Obstruction", 4)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("l", &self.l)?;
        st.serialize_field("re", &self.amplitude.re)?;
        st.serialize_field("im", &self.amplitude.im)?;
        st.end()
    }
}

/// Outcome of an analysis up to some maximal order.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceReport {
    pub rot: RotationNumber,
    /// Largest `m` such that orders `1..=m` all persist.
    pub verified_order: usize,
    /// First order that breaks; `None` if none did up to the cap.
    pub breaking_order: Option<usize>,
    pub obstructions: Vec<Obstruction>,
    /// `L_k` for each analysed order (zero where the order persists).
    pub melnikov: Vec<TrigPoly>,
    /// `ζ_k` for each analysed order.
    pub zeta: Vec<TrigPoly>,
    /// `η_k` for each analysed order (zero where the order persists).
    pub correction: Vec<TrigPoly>,
    /// Periodic-orbit length coefficients `L_0..L_m`.
    pub lengths: Vec<f64>,
}

impl PersistenceReport {
    pub fn new(rot: RotationNumber) -> Self {
        Self {
            rot,
            verified_order: 0,
            breaking_order: None,
            obstructions: Vec::new(),
            melnikov: Vec::new(),
            zeta: Vec::new(),
            correction: Vec::new(),
            lengths: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

impl Serialize for PersistenceReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("PersistenceReport", 8)?;
        st.serialize_field("p", &self.rot.p())?;
        st.serialize_field("q", &self.rot.q())?;
        st.serialize_field("verified_order", &self.verified_order)?;
        st.serialize_field("breaking_order", &self.breaking_order)?;
        st.serialize_field("obstructions", &self.obstructions)?;
        st.serialize_field("melnikov", &self.melnikov)?;
        st.serialize_field("zeta", &self.zeta)?;
        st.serialize_field("correction", &self.correction)?;
        st.end()
    }
}
