//! Numerical billiard map in line coordinates and residual checks of the
//! perturbative caustic against it.

mod fit;
mod residual;

use std::f64::consts::{PI, TAU};

pub use fit::{geometric_sweep, scaling_fit, scaling_fit_samples, sweep_csv, ScalingFit, SweepPoint};
pub use residual::{
    action_and_identities, default_eps_sweep, invariance_residual, reconstruct_caustic, residual_csv, residual_function,
    residual_sweep, uniform_grid, ActionDiagnostics, CausticSamples, InvarianceSamples, ResidualSamples, DEFAULT_RESIDUAL_GRID,
};

use crate::deformations::{eval_with_derivatives, DeformationSpec};
use crate::error::{Error, Result};
use crate::fourier::TrigPoly;

/// Grid used for the convexity check.
pub const CONVEXITY_GRID: usize = 1024;
const MAX_ITERATIONS: usize = 64;
const SOLVE_TOLERANCE: f64 = 1e-13;

/// An oriented line: `phi` is the direction of its right normal and
/// `lambda` its signed distance to the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineCoords {
    pub phi: f64,
    pub lambda: f64,
}

/// Truncated support function `h(ψ; ε) = 1 + sum_{k<=K} ε^k h_k(ψ)` of a
/// strictly convex table.
#[derive(Debug, Clone)]
pub struct SupportEvaluator {
    epsilon: f64,
    /// `ε^k h_k` summed into one polynomial, without the constant 1.
    deviation: TrigPoly,
    h_orders: Vec<TrigPoly>,
}

impl SupportEvaluator {
    pub fn new(h_orders: Vec<TrigPoly>, epsilon: f64) -> Result<Self> {
        let mut deviation = TrigPoly::zero();
        let mut power = 1.0;
        for hk in &h_orders {
            power *= epsilon;
            deviation += &hk.scale(power);
        }
        let ev = Self { epsilon, deviation, h_orders };
        let (mut min_h, mut min_curvature) = (f64::INFINITY, f64::INFINITY);
        for i in 0..CONVEXITY_GRID {
            let (h, _, dd) = ev.eval(TAU * i as f64 / CONVEXITY_GRID as f64);
            min_h = min_h.min(h);
            min_curvature = min_curvature.min(h + dd);
        }
        if !(min_h > 0.0 && min_curvature > 0.0) {
            return Err(Error::NotConvex { epsilon, min_h, min_curvature });
        }
        Ok(ev)
    }

    /// First `order` orders of a spec at a given ε.
    pub fn from_spec(spec: &DeformationSpec, epsilon: f64, order: usize) -> Result<Self> {
        Self::new(spec.h_orders(order), epsilon)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn h_orders(&self) -> &[TrigPoly] {
        &self.h_orders
    }

    /// `(h, h', h'')` at `psi`.
    pub fn eval(&self, psi: f64) -> (f64, f64, f64) {
        let (v, d, dd) = self.eval_deviation(psi);
        (1.0 + v, d, dd)
    }

    /// `(h - 1, h', h'')` at `psi`, free of the cancellation in `h - 1`.
    pub fn eval_deviation(&self, psi: f64) -> (f64, f64, f64) {
        eval_with_derivatives(&self.deviation, psi)
    }

    /// Radius of curvature `h + h''`.
    pub fn curvature_radius(&self, psi: f64) -> f64 {
        let (h, _, dd) = self.eval(psi);
        h + dd
    }
}

pub fn eval_support(ev: &SupportEvaluator, psi: f64) -> (f64, f64, f64) {
    ev.eval(psi)
}

/// One solved step, with the half-angle `θ = (φ_1 - φ)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDetail {
    pub image: LineCoords,
    pub theta: f64,
    pub iterations: usize,
}

/// Billiard map `(φ, λ) ↦ (φ_1, λ_1)`.
pub fn billiard_step(line: LineCoords, ev: &SupportEvaluator) -> Result<LineCoords> {
    Ok(billiard_step_detail(line, ev, None)?.image)
}

/// Solves `λ = h(ψ) cos θ - h'(ψ) sin θ` for `θ ∈ (0, π)` with
/// `ψ = φ + θ`, by Newton iteration safeguarded with bisection.
///
/// `theta_guess` defaults to the value on the unperturbed circle.
pub fn billiard_step_detail(line: LineCoords, ev: &SupportEvaluator, theta_guess: Option<f64>) -> Result<StepDetail> {
    let LineCoords { phi, lambda } = line;
    let f = |theta: f64| {
        let (h, d, dd) = ev.eval(phi + theta);
        let (s, c) = theta.sin_cos();
        (h * c - d * s - lambda, -(h + dd) * s)
    };
    let (f_lo, _) = f(0.0);
    let (f_hi, _) = f(PI);
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::LineMissesTable { phi, lambda });
    }
    let (mut lo, mut hi) = (0.0, PI);
    let mut theta = theta_guess.unwrap_or_else(|| (lambda / ev.eval(phi).0).clamp(-1.0, 1.0).acos());
    if !(theta > lo && theta < hi) {
        theta = 0.5 * (lo + hi);
    }
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (value, slope) = f(theta);
        residual = value.abs();
        if value > 0.0 {
            lo = theta;
        } else {
            hi = theta;
        }
        if residual < SOLVE_TOLERANCE {
            // one polishing step
            if slope != 0.0 {
                let polished = theta - value / slope;
                if polished > lo && polished < hi && f(polished).0.abs() <= residual {
                    theta = polished;
                }
            }
            break;
        }
        let newton = theta - value / slope;
        theta = if slope < 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    if residual >= SOLVE_TOLERANCE {
        return Err(Error::NoConvergence { iterations, residual });
    }
    let (h, d, _) = ev.eval(phi + theta);
    let (s, c) = theta.sin_cos();
    Ok(StepDetail { image: LineCoords { phi: phi + 2.0 * theta, lambda: h * c + d * s }, theta, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformations::BivariatePoly;
    use proptest::prelude::*;

    fn circle() -> SupportEvaluator {
        SupportEvaluator::new(Vec::new(), 0.0).unwrap()
    }

    #[test]
    fn support_examples() {
        assert_eq!(eval_support(&circle(), 1.2), (1.0, 0.0, 0.0));
        let shifted = DeformationSpec::cartesian(BivariatePoly::from_terms([(1, 0, 2.0)]));
        let ev = SupportEvaluator::from_spec(&shifted, 0.1, 18).unwrap();
        assert!((ev.eval(0.0).0 - (0.1 + 1.01f64.sqrt())).abs() < 1e-15);
        assert!(matches!(
            SupportEvaluator::new(vec![TrigPoly::cos(2, 10.0)], 0.5),
            Err(Error::NotConvex { .. })
        ));
    }

    #[test]
    fn circle_rotates_by_omega() {
        let omega = TAU / 5.0;
        let line = LineCoords { phi: 0.3, lambda: (omega / 2.0).cos() };
        let next = billiard_step(line, &circle()).unwrap();
        assert!((next.phi - (0.3 + omega)).abs() < 1e-14);
        assert!((next.lambda - line.lambda).abs() < 1e-15);
        let diameter = billiard_step(LineCoords { phi: 1.0, lambda: 0.0 }, &circle()).unwrap();
        assert!((diameter.phi - (1.0 + PI)).abs() < 1e-14 && diameter.lambda.abs() < 1e-15);
    }

    #[test]
    fn rejects_lines_outside() {
        assert!(matches!(
            billiard_step(LineCoords { phi: 0.0, lambda: 1.5 }, &circle()),
            Err(Error::LineMissesTable { .. })
        ));
    }

    #[test]
    fn translated_circle_orbit_closes() {
        // (x - ε)² + y² = 1 + ε²: a circle of radius R centred at (ε, 0)
        let eps = 0.05;
        let spec = DeformationSpec::cartesian(BivariatePoly::from_terms([(1, 0, 2.0)]));
        let ev = SupportEvaluator::from_spec(&spec, eps, 24).unwrap();
        let r = (1.0 + eps * eps).sqrt();
        let omega = TAU / 5.0;
        let phi0: f64 = 0.4;
        let start = LineCoords { phi: phi0, lambda: r * (omega / 2.0).cos() + eps * phi0.cos() };
        let mut line = start;
        for _ in 0..5 {
            line = billiard_step(line, &ev).unwrap();
        }
        assert!((line.phi - phi0 - TAU).abs() < 1e-10);
        assert!((line.lambda - start.lambda).abs() < 1e-10);
    }

    fn jacobian_det(ev: &SupportEvaluator, line: LineCoords) -> f64 {
        let step = 1e-6;
        let at = |dphi: f64, dl: f64| billiard_step(LineCoords { phi: line.phi + dphi, lambda: line.lambda + dl }, ev).unwrap();
        let (pp, pm) = (at(step, 0.0), at(-step, 0.0));
        let (lp, lm) = (at(0.0, step), at(0.0, -step));
        let a = (pp.phi - pm.phi) / (2.0 * step);
        let b = (lp.phi - lm.phi) / (2.0 * step);
        let c = (pp.lambda - pm.lambda) / (2.0 * step);
        let d = (lp.lambda - lm.lambda) / (2.0 * step);
        a * d - b * c
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn area_preserving_and_twisting(phi in 0.0f64..TAU, frac in 0.05f64..0.9, a in -1.0f64..1.0, b in -1.0f64..1.0) {
            let ev = SupportEvaluator::new(vec![&TrigPoly::cos(3, a) + &TrigPoly::sin(2, b)], 0.05).unwrap();
            let lambda = frac * ev.eval(phi).0;
            let det = jacobian_det(&ev, LineCoords { phi, lambda });
            prop_assert!((det - 1.0).abs() < 1e-6, "det {}", det);
            let detail = billiard_step_detail(LineCoords { phi, lambda }, &ev, None).unwrap();
            prop_assert!(0.5 * ev.curvature_radius(phi + detail.theta) * detail.theta.sin() > 0.0);
        }
    }
}
