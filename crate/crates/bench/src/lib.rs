//! Shared fixtures for the benchmarks.
use caustica::deformations::{BivariatePoly, DeformationSpec};
use caustica::oracle::{LineCoords, SupportEvaluator};
use caustica::{RotationNumber, TrigPoly};

/// `-y^n + 0.3 x^2 y` as a cartesian deformation.
pub fn mixed_spec(n: u32) -> DeformationSpec {
    DeformationSpec::cartesian(BivariatePoly::from_terms([(0, n, -1.0), (2, 1, 0.3)]))
}

/// A dense real polynomial with harmonics `1..=degree`.
pub fn dense_poly(degree: i64) -> TrigPoly {
    (1..=degree).fold(TrigPoly::zero(), |acc, l| {
        &(&acc + &TrigPoly::cos(l, 1.0 / l as f64)) + &TrigPoly::sin(l, 0.5 / (l * l) as f64)
    })
}

/// Evaluator and a starting line on the `rot`-caustic of the unperturbed circle.
pub fn step_fixture(rot: &RotationNumber, eps: f64) -> (SupportEvaluator, LineCoords) {
    let spec = mixed_spec(4);
    let ev = SupportEvaluator::from_spec(&spec, eps, 8).expect("convex table");
    (ev, LineCoords { phi: 0.3, lambda: (rot.omega() / 2.0).cos() })
}
