//! Order-by-order persistence of a resonant caustic: obstruction test,
//! difference-equation solves, Melnikov potentials and corrections.

mod report;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use report::{Obstruction, PersistenceReport};

use crate::deformations::DeformationSpec;
use crate::error::{Error, Result};
use crate::expansions::ExpansionState;
use crate::fourier::{apply_operator, invert_delta_with, Operator, RotationNumber, Tolerances, TrigPoly};

/// Default and hard limits on the number of orders analysed.
pub const DEFAULT_MAX_ORDER: usize = 12;
pub const MAX_ORDER_CAP: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Persists {
        theta_k: TrigPoly,
        phi_k: TrigPoly,
        psi_k: TrigPoly,
    },
    Breaks {
        /// `qZ*` harmonics of `Q_k`.
        resonant_part: TrigPoly,
        melnikov_potential: TrigPoly,
        /// `η_k`.
        correction: TrigPoly,
    },
}

impl StepOutcome {
    pub fn persists(&self) -> bool {
        matches!(self, Self::Persists { .. })
    }
}

/// `ν_l(p/q)` for `|l| >= 2`, `l` not a multiple of `q`.
pub fn nu_factor(l: i64, rot: &RotationNumber) -> Result<f64> {
    if l.abs() < 2 {
        return Err(Error::OutOfDomain { l, reason: "|l| must be at least 2" });
    }
    if rot.is_resonant(l) {
        return Err(Error::OutOfDomain { l, reason: "l is a multiple of q" });
    }
    let q = rot.q();
    let t1 = (PI * rot.rho()).tan();
    // tan has period π, so reduce l p modulo q before scaling
    let r = (l * rot.p()).rem_euclid(q);
    if (2 * r) % q == 0 {
        return Ok(1.0 / t1);
    }
    let tl = (PI * r as f64 / q as f64).tan();
    Ok((tl - l as f64 * t1) / (t1 * tl))
}

fn largest_resonant(poly: &TrigPoly, rot: &RotationNumber, threshold: f64) -> Option<(i64, f64)> {
    poly.iter()
        .filter(|&(l, _)| l != 0 && rot.is_resonant(l))
        .map(|(l, c)| (l, c.norm()))
        .filter(|&(_, m)| m > threshold)
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

/// First-order solution `θ_1 = sum_{l ∉ qZ ∪ {±1}} ν_l ĥ_{1,l} e^{ilt}`.
pub fn theta1_closed_form(h1: &TrigPoly, rot: &RotationNumber) -> Result<TrigPoly> {
    let tol = Tolerances::default();
    if let Some((harmonic, magnitude)) = largest_resonant(h1, rot, tol.obstruction_threshold(h1.max_abs())) {
        return Err(Error::ResonantFirstOrder { harmonic, magnitude });
    }
    let mut terms = Vec::new();
    for (l, c) in h1.iter() {
        if l.abs() >= 2 && !rot.is_resonant(l) {
            terms.push((l, c * nu_factor(l, rot)?));
        }
    }
    Ok(TrigPoly::from_coeffs(terms, h1.is_real()))
}

/// `ζ_k` with `s ζ_k' = Q̃_k` and zero mean.
pub fn zeta_extract(q_tilde: &TrigPoly, rot: &RotationNumber) -> Result<TrigPoly> {
    zeta_extract_with(q_tilde, rot, &Tolerances::default())
}

fn check_mean(poly: &TrigPoly, what: &'static str, tol: &Tolerances) -> Result<()> {
    let mean = poly.mean().norm();
    if mean > tol.obstruction_threshold(poly.max_abs()) {
        return Err(Error::NonzeroMean { what, mean });
    }
    Ok(())
}

fn zeta_extract_with(q_tilde: &TrigPoly, rot: &RotationNumber, tol: &Tolerances) -> Result<TrigPoly> {
    check_mean(q_tilde, "Q~_k", tol)?;
    Ok(q_tilde.antiderivative().scale(1.0 / rot.s()))
}

/// `L_k`: zero-mean antiderivative of `2 μ{Q_k}`.
pub fn melnikov_potential(q_k: &TrigPoly, rot: &RotationNumber) -> Result<TrigPoly> {
    check_mean(q_k, "Q_k", &Tolerances::default())?;
    Ok(apply_operator(q_k, Operator::ResonantProjection, rot).antiderivative().scale(2.0))
}

/// `η_k` supported on `qZ*`: `η̂_{k,l} = -Q̂_{k,l} / (i l s)`.
pub fn compute_correction(q_k: &TrigPoly, rot: &RotationNumber) -> Result<TrigPoly> {
    check_mean(q_k, "Q_k", &Tolerances::default())?;
    Ok(correction_unchecked(q_k, rot))
}

fn correction_unchecked(q_k: &TrigPoly, rot: &RotationNumber) -> TrigPoly {
    let s = rot.s();
    apply_operator(q_k, Operator::ResonantProjection, rot)
        .map_coeffs(q_k.is_real(), |l, c| -c / Complex64::new(0.0, l as f64 * s))
}

/// Runs order `k = state.order() + 1`. On persistence the solved order is
/// appended to `state`; on breakup `state` is left unchanged.
pub fn persistence_step(state: &mut ExpansionState, k: usize) -> Result<StepOutcome> {
    if k != state.order() + 1 {
        return Err(Error::Precondition(format!(
            "order {k} needs orders 1..{} to persist, but only {} did",
            k - 1,
            state.order()
        )));
    }
    let rot = *state.rot();
    let tol = *state.tol();
    let terms = state.order_terms(k)?;
    check_mean(&terms.q, "Q_k", &tol)?;

    let threshold = tol.obstruction_threshold(terms.q.max_abs());
    if largest_resonant(&terms.q, &rot, threshold).is_some() {
        return Ok(StepOutcome::Breaks {
            resonant_part: apply_operator(&terms.q, Operator::ResonantProjection, &rot),
            melnikov_potential: apply_operator(&terms.q, Operator::ResonantProjection, &rot).antiderivative().scale(2.0),
            correction: correction_unchecked(&terms.q, &rot),
        });
    }

    // s δθ_k = δR̃_k - σQ_k; the resonant part of the right side is below
    // the obstruction threshold and is dropped before inverting.
    let rhs = &apply_operator(&terms.r_tilde, Operator::Diff, &rot) - &apply_operator(&terms.q, Operator::Sum, &rot);
    let rhs = rhs.filter(|l| !rot.is_resonant(l)).scale(1.0 / rot.s());
    let zero = TrigPoly::zero();
    let theta = invert_delta_with(&rhs, &rot, &zero, &tol)?;
    let phi = invert_delta_with(&theta.scale(2.0), &rot, &zero, &tol)?;
    let psi = &phi + &theta;
    let zeta = zeta_extract_with(&terms.q_tilde, &rot, &tol)?;
    state.push_order(terms, theta.clone(), phi.clone(), psi.clone(), zeta)?;
    Ok(StepOutcome::Persists { theta_k: theta, phi_k: phi, psi_k: psi })
}

/// Closed-form `ζ_3` from `θ_1, θ_2, ψ_1, h_1`, with zero mean.
pub fn zeta3_reference(state: &ExpansionState) -> Result<TrigPoly> {
    if state.order() < 2 {
        return Err(Error::Precondition("orders 1 and 2 must persist".into()));
    }
    let rot = state.rot();
    let (c, s) = (rot.c(), rot.s());
    let th1 = state.theta(1)?;
    let th2 = state.theta(2)?;
    let psi1 = state.psi(1)?;
    let h1 = state.h(1);
    let th1_sq = th1.multiply(th1);
    let mut z = th1.multiply(th2);
    z += &h1.multiply(&th1_sq).scale(0.5);
    z -= &h1.nth_derivative(2).multiply(&psi1.multiply(psi1)).scale(0.5);
    z += &th1_sq.multiply(th1).scale(c / (3.0 * s));
    z -= &h1.derivative().multiply(th1).multiply(psi1).scale(c / s);
    Ok(z.filter(|l| l != 0))
}

/// Runs [`persistence_step`] for `k = 1..=max_order`, stopping at the first
/// breakup. Returns the report and the final state.
pub fn analyze_orders(
    h_orders: Vec<TrigPoly>,
    rot: RotationNumber,
    max_order: usize,
    tol: Tolerances,
) -> Result<(PersistenceReport, ExpansionState)> {
    check_max_order(max_order)?;
    let mut state = ExpansionState::new(rot, h_orders, tol);
    let mut report = PersistenceReport::new(rot);
    for k in 1..=max_order {
        match persistence_step(&mut state, k)? {
            StepOutcome::Persists { .. } => {
                report.verified_order = k;
                report.melnikov.push(TrigPoly::zero());
                report.correction.push(TrigPoly::zero());
                report.zeta.push(state.zeta(k)?.clone());
            }
            StepOutcome::Breaks { resonant_part, melnikov_potential, correction } => {
                report.breaking_order = Some(k);
                let s = rot.s();
                for (l, c) in resonant_part.iter() {
                    report.obstructions.push(Obstruction { k, l, amplitude: c / Complex64::new(0.0, l as f64 * s) });
                }
                report.melnikov.push(melnikov_potential);
                report.correction.push(correction);
                let q_tilde = state.order_terms(k)?.q_tilde;
                report.zeta.push(zeta_extract_with(&q_tilde, &rot, &tol)?);
                break;
            }
        }
    }
    report.lengths = length_coefficients(&state)?;
    Ok((report, state))
}

fn check_max_order(max_order: usize) -> Result<()> {
    if max_order == 0 || max_order > MAX_ORDER_CAP {
        return Err(Error::Precondition(format!("max_order must lie in 1..={MAX_ORDER_CAP}, got {max_order}")));
    }
    Ok(())
}

/// [`analyze_orders`] on the first `max_order` orders of a spec.
pub fn run_analysis(spec: &DeformationSpec, rot: RotationNumber, max_order: usize) -> Result<PersistenceReport> {
    run_analysis_with(spec, rot, max_order, Tolerances::default())
}

pub fn run_analysis_with(
    spec: &DeformationSpec,
    rot: RotationNumber,
    max_order: usize,
    tol: Tolerances,
) -> Result<PersistenceReport> {
    check_max_order(max_order)?;
    Ok(analyze_orders(spec.h_orders(max_order), rot, max_order, tol)?.0)
}

/// Adds `η_k` at every breaking order up to `target`, so that the returned
/// orders `h_1..h_target` persist to order `target`.
pub fn correct_orders(
    h_orders: Vec<TrigPoly>,
    rot: RotationNumber,
    target: usize,
    tol: Tolerances,
) -> Result<(Vec<TrigPoly>, ExpansionState)> {
    check_max_order(target)?;
    let mut h = h_orders;
    h.resize(h.len().max(target), TrigPoly::zero());
    let mut state = ExpansionState::new(rot, h, tol);
    for k in 1..=target {
        if let StepOutcome::Breaks { correction, .. } = persistence_step(&mut state, k)? {
            let corrected = &state.h(k) + &correction;
            state.set_h(k, corrected)?;
            match persistence_step(&mut state, k)? {
                StepOutcome::Persists { .. } => {}
                StepOutcome::Breaks { resonant_part, .. } => {
                    let (harmonic, magnitude) = largest_resonant(&resonant_part, &rot, 0.0).unwrap_or((0, 0.0));
                    return Err(Error::ResonantRhs { harmonic, magnitude });
                }
            }
        }
    }
    Ok((state.h_orders().to_vec(), state))
}

/// Corrected Fourier spec persisting to order `target`.
pub fn correct_to(spec: &DeformationSpec, rot: RotationNumber, target: usize) -> Result<DeformationSpec> {
    let (h, _) = correct_orders(spec.h_orders(target), rot, target, Tolerances::default())?;
    Ok(DeformationSpec::fourier(h))
}

/// Coefficients `L_0..L_m` of the periodic-orbit length `2q μ{h∘ψ sin θ}`.
fn length_coefficients(state: &ExpansionState) -> Result<Vec<f64>> {
    let q = state.rot().q() as f64;
    (0..=state.order())
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..=k {
                acc += state.comp_h(l)?.multiply(state.sin_coeff(k - l)?).mean();
            }
            Ok(2.0 * q * acc.re)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformations::BivariatePoly;
    use proptest::prelude::*;

    fn rot(p: i64, q: i64) -> RotationNumber {
        RotationNumber::new(p, q).unwrap()
    }

    fn state(r: RotationNumber, h: Vec<TrigPoly>) -> ExpansionState {
        ExpansionState::new(r, h, Tolerances::default())
    }

    #[test]
    fn nu_examples() {
        assert!((nu_factor(2, &rot(1, 4)).unwrap() - 1.0).abs() < 1e-15);
        let (t1, t2) = ((PI / 5.0).tan(), (2.0 * PI / 5.0).tan());
        assert!((nu_factor(2, &rot(1, 5)).unwrap() - (t2 - 2.0 * t1) / (t1 * t2)).abs() < 1e-14);
        assert!(nu_factor(5, &rot(1, 5)).is_err());
        assert!(nu_factor(1, &rot(1, 5)).is_err());
    }

    #[test]
    fn nu_nonvanishing() {
        for r in RotationNumber::enumerate(3, 30, false) {
            for l in 2..=50 {
                if !r.is_resonant(l) {
                    assert!(nu_factor(l, &r).unwrap().abs() > 1e-8, "l={l} rot={r}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn nu_is_even(l in 2i64..200, q in 3i64..40, p in 1i64..20) {
            let r = RotationNumber::new(p, q);
            prop_assume!(r.is_ok());
            let r = r.unwrap();
            prop_assume!(!r.is_resonant(l));
            let (a, b) = (nu_factor(l, &r).unwrap(), nu_factor(-l, &r).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn theta1_examples() {
        let r = rot(1, 5);
        let th = theta1_closed_form(&TrigPoly::cos(2, 1.0), &r).unwrap();
        assert!(th.max_diff(&TrigPoly::cos(2, nu_factor(2, &r).unwrap())) < 1e-15);
        assert!(theta1_closed_form(&TrigPoly::cos(1, 1.0), &r).unwrap().is_zero());
        assert!(matches!(theta1_closed_form(&TrigPoly::cos(5, 1.0), &r), Err(Error::ResonantFirstOrder { .. })));
    }

    #[test]
    fn first_order_routes_agree() {
        let r = rot(2, 7);
        let h1 = &(&TrigPoly::cos(2, 1.0) + &TrigPoly::sin(3, -0.4)) + &(&TrigPoly::cos(1, 0.7) + &TrigPoly::cos(9, 0.2));
        let mut st = state(r, vec![h1.clone()]);
        let StepOutcome::Persists { theta_k, .. } = persistence_step(&mut st, 1).unwrap() else { panic!("breaks") };
        assert!(theta_k.max_diff(&theta1_closed_form(&h1, &r).unwrap()) < 1e-10);
    }

    #[test]
    fn quarter_rotation_breaks_at_two() {
        let r = rot(1, 4);
        let mut st = state(r, vec![TrigPoly::cos(2, 1.0)]);
        assert!(persistence_step(&mut st, 1).unwrap().persists());
        assert!(st.theta(1).unwrap().max_diff(&TrigPoly::cos(2, 1.0)) < 1e-14);
        let StepOutcome::Breaks { resonant_part, correction, .. } = persistence_step(&mut st, 2).unwrap() else {
            panic!("persists")
        };
        // amplitude of h_2 + ζ_2 at l = ±4 is 1/8
        for l in [4, -4] {
            let amp = resonant_part.coeff(l) / Complex64::new(0.0, l as f64 * r.s());
            assert!((amp - Complex64::new(0.125, 0.0)).norm() < 1e-12);
            assert!((correction.coeff(l) + amp).norm() < 1e-12);
        }
        assert!(matches!(persistence_step(&mut st, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_deformation_persists_trivially() {
        let mut st = state(rot(1, 3), vec![]);
        for k in 1..=5 {
            let StepOutcome::Persists { theta_k, phi_k, psi_k } = persistence_step(&mut st, k).unwrap() else {
                panic!()
            };
            assert!(theta_k.is_zero() && phi_k.is_zero() && psi_k.is_zero());
        }
    }

    #[test]
    fn helper_examples() {
        let r = rot(1, 5);
        let l5 = melnikov_potential(&TrigPoly::cos(5, 1.0), &r).unwrap();
        assert!(l5.max_diff(&TrigPoly::sin(5, 0.4)) < 1e-15);
        let mixed = &TrigPoly::sin(5, 1.0) + &TrigPoly::cos(2, 1.0);
        assert!(melnikov_potential(&mixed, &r).unwrap().max_diff(&TrigPoly::cos(5, -0.4)) < 1e-15);
        assert!(melnikov_potential(&TrigPoly::cos(2, 1.0), &r).unwrap().is_zero());
        let eta = compute_correction(&TrigPoly::cos(5, 1.0), &r).unwrap();
        assert!(eta.max_diff(&TrigPoly::sin(5, -1.0 / (5.0 * r.s()))) < 1e-15);
        assert!(compute_correction(&TrigPoly::constant(1.0), &r).is_err());
        assert!(zeta_extract(&TrigPoly::zero(), &r).unwrap().is_zero());
        assert!(zeta_extract(&TrigPoly::constant(0.3), &r).is_err());
    }

    #[test]
    fn zeta2_matches_half_theta_squared_on_resonant_harmonics() {
        let r = rot(1, 5);
        let h1 = &TrigPoly::cos(2, 1.0) + &TrigPoly::cos(3, 0.5);
        let (report, st) = analyze_orders(vec![h1], r, 2, Tolerances::default()).unwrap();
        assert_eq!(report.breaking_order, Some(2));
        let th1 = st.theta(1).unwrap();
        let expect = th1.multiply(th1).scale(0.5);
        let proj = |p: &TrigPoly| apply_operator(p, Operator::ResonantProjection, &r);
        assert!(proj(&expect).max_abs() > 1e-3);
        assert!(proj(&report.zeta[1]).max_diff(&proj(&expect)) < 1e-12);
    }

    #[test]
    fn translated_circle_never_breaks() {
        let spec = DeformationSpec::cartesian(BivariatePoly::from_terms([(1, 0, 2.0)]));
        let report = run_analysis(&spec, rot(1, 5), 6).unwrap();
        assert_eq!(report.verified_order, 6);
        assert_eq!(report.breaking_order, None);
        // length 2q sqrt(1 + ε²) s
        assert!((report.lengths[2] - 5.0 * rot(1, 5).s()).abs() < 1e-12);
        assert!(report.lengths[1].abs() < 1e-14);
    }

    #[test]
    fn resonant_first_order_breaks_at_one() {
        let report = run_analysis(&DeformationSpec::fourier(vec![TrigPoly::cos(5, 1.0)]), rot(1, 5), 4).unwrap();
        assert_eq!(report.verified_order, 0);
        assert_eq!(report.breaking_order, Some(1));
        let report = run_analysis(&DeformationSpec::fourier(vec![TrigPoly::cos(2, 1.0)]), rot(1, 4), 4).unwrap();
        assert_eq!(report.breaking_order, Some(2));
        assert_eq!(report.obstructions.len(), 2);
    }

    #[test]
    fn correction_restores_persistence() {
        let r = rot(1, 4);
        let spec = DeformationSpec::fourier(vec![TrigPoly::cos(2, 1.0)]);
        let fixed = correct_to(&spec, r, 4).unwrap();
        let report = run_analysis(&fixed, r, 4).unwrap();
        assert_eq!(report.verified_order, 4);
        // correcting an already-persisting spec is the identity
        let again = correct_to(&fixed, r, 4).unwrap();
        assert_eq!(again.h_orders(4), fixed.h_orders(4));
    }

    #[test]
    fn max_order_limits() {
        let spec = DeformationSpec::circle();
        assert!(run_analysis(&spec, rot(1, 3), 0).is_err());
        assert!(run_analysis(&spec, rot(1, 3), MAX_ORDER_CAP + 1).is_err());
    }
}
