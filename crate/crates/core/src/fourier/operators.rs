use std::f64::consts::PI;

use num_complex::Complex64;

use super::{RotationNumber, Tolerances, TrigPoly};
use crate::error::{Error, Result};

/// Operators that act diagonally on Fourier coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    /// `a(t + omega)`.
    Shift,
    /// `a(t + omega) + a(t)`.
    Sum,
    /// `a(t + omega) - a(t)`.
    Diff,
    /// q-point average, the projection onto `qZ` harmonics.
    Average,
    /// Projection onto `qZ \ {0}` harmonics.
    ResonantProjection,
}

/// `e^{i l omega}`, reduced through `l p mod q` so that resonant harmonics
/// get exactly 1.
pub(crate) fn shift_factor(l: i64, rot: &RotationNumber) -> Complex64 {
    let r = (l * rot.p()).rem_euclid(rot.q());
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / rot.q() as f64)
}

pub fn apply_operator(a: &TrigPoly, kind: Operator, rot: &RotationNumber) -> TrigPoly {
    let one = Complex64::new(1.0, 0.0);
    match kind {
        Operator::Shift => a.map_coeffs(a.is_real(), |l, c| c * shift_factor(l, rot)),
        Operator::Sum => a.map_coeffs(a.is_real(), |l, c| c * (shift_factor(l, rot) + one)),
        Operator::Diff => a.map_coeffs(a.is_real(), |l, c| c * (shift_factor(l, rot) - one)),
        Operator::Average => a.filter(|l| rot.is_resonant(l)),
        Operator::ResonantProjection => a.filter(|l| l != 0 && rot.is_resonant(l)),
    }
}

/// Solves `delta{a} = b` with `mu{a}` equal to `prescribed_average`, using
/// default tolerances.
pub fn invert_delta(b: &TrigPoly, rot: &RotationNumber, prescribed_average: &TrigPoly) -> Result<TrigPoly> {
    invert_delta_with(b, rot, prescribed_average, &Tolerances::default())
}

/// As [`invert_delta`] with explicit tolerances. Fails when `b` carries a
/// resonant harmonic above the zero threshold: the equation then has no
/// periodic solution.
pub fn invert_delta_with(
    b: &TrigPoly,
    rot: &RotationNumber,
    prescribed_average: &TrigPoly,
    tol: &Tolerances,
) -> Result<TrigPoly> {
    let threshold = tol.zero_threshold(b.max_abs());
    if let Some((harmonic, magnitude)) = b
        .iter()
        .filter(|&(l, _)| rot.is_resonant(l))
        .map(|(l, c)| (l, c.norm()))
        .filter(|&(_, m)| m > threshold)
        .max_by(|x, y| x.1.total_cmp(&y.1))
    {
        return Err(Error::ResonantRhs { harmonic, magnitude });
    }
    if let Some((harmonic, _)) = prescribed_average.iter().find(|&(l, c)| !rot.is_resonant(l) && c.norm() > tol.abs_floor) {
        return Err(Error::NonResonantAverage { harmonic });
    }
    let one = Complex64::new(1.0, 0.0);
    let solved = TrigPoly::from_coeffs(
        b.iter().filter(|&(l, _)| !rot.is_resonant(l)).map(|(l, c)| (l, c / (shift_factor(l, rot) - one))),
        b.is_real(),
    );
    Ok(&solved + &prescribed_average.filter(|l| rot.is_resonant(l)))
}

/// Solves `delta{t + a(t)} = b` for periodic `a` with `mu{a}` prescribed.
/// Requires `mu{b}` to be the constant `omega`.
pub fn invert_delta_affine(b: &TrigPoly, rot: &RotationNumber, prescribed_average: &TrigPoly) -> Result<TrigPoly> {
    let tol = Tolerances::default();
    let mean = b.mean();
    if (mean - Complex64::new(rot.omega(), 0.0)).norm() > tol.zero_threshold(b.max_abs().max(rot.omega())) {
        return Err(Error::ResonantRhs { harmonic: 0, magnitude: (mean.re - rot.omega()).abs().max(mean.im.abs()) });
    }
    let periodic = b.filter(|l| l != 0);
    invert_delta_with(&periodic, rot, prescribed_average, &tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rot(p: i64, q: i64) -> RotationNumber {
        RotationNumber::new(p, q).unwrap()
    }

    #[test]
    fn average_projects_onto_resonant_harmonics() {
        let r = rot(1, 3);
        let e3 = TrigPoly::exp(3, Complex64::new(1.0, 0.0));
        assert_eq!(apply_operator(&e3, Operator::Average, &r), e3);
        let e1 = TrigPoly::exp(1, Complex64::new(1.0, 0.0));
        assert!(apply_operator(&e1, Operator::Average, &r).is_zero());
    }

    #[test]
    fn quarter_shift_is_multiplication_by_i() {
        let e1 = TrigPoly::exp(1, Complex64::new(1.0, 0.0));
        let shifted = apply_operator(&e1, Operator::Shift, &rot(1, 4));
        assert!((shifted.coeff(1) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn diff_kills_constants() {
        assert!(apply_operator(&TrigPoly::constant(3.0), Operator::Diff, &rot(2, 7)).is_zero());
    }

    #[test]
    fn shift_matches_pointwise_translation() {
        let r = rot(2, 9);
        let a = &TrigPoly::cos(3, 1.3) + &TrigPoly::sin(5, -0.4);
        let shifted = apply_operator(&a, Operator::Shift, &r);
        for i in 0..10 {
            let t = 0.37 * i as f64;
            assert!((shifted.eval(t) - a.eval(t + r.omega())).abs() < 1e-13);
        }
    }

    #[test]
    fn invert_delta_simple_harmonic() {
        let r = rot(1, 5);
        let b = TrigPoly::exp(1, Complex64::new(1.0, 0.0));
        let a = invert_delta(&b, &r, &TrigPoly::zero()).unwrap();
        let expect = Complex64::new(1.0, 0.0) / (Complex64::from_polar(1.0, 2.0 * PI / 5.0) - 1.0);
        assert!((a.coeff(1) - expect).norm() < 1e-15);
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn invert_delta_zero() {
        assert!(invert_delta(&TrigPoly::zero(), &rot(1, 5), &TrigPoly::zero()).unwrap().is_zero());
    }

    #[test]
    fn invert_delta_rejects_resonant_rhs() {
        let b = TrigPoly::exp(5, Complex64::new(1.0, 0.0));
        assert!(matches!(invert_delta(&b, &rot(1, 5), &TrigPoly::zero()), Err(Error::ResonantRhs { harmonic: 5, .. })));
    }

    #[test]
    fn invert_delta_keeps_prescribed_average() {
        let r = rot(1, 4);
        let avg = TrigPoly::cos(4, 0.3);
        let a = invert_delta(&TrigPoly::cos(1, 1.0), &r, &avg).unwrap();
        assert!(apply_operator(&a, Operator::Average, &r).max_diff(&avg) < 1e-15);
        assert!(invert_delta(&TrigPoly::cos(1, 1.0), &r, &TrigPoly::cos(1, 1.0)).is_err());
    }

    #[test]
    fn invert_delta_affine_examples() {
        let r = rot(1, 5);
        let w = TrigPoly::constant(r.omega());
        assert!(invert_delta_affine(&w, &r, &TrigPoly::zero()).unwrap().is_zero());
        let b = &w + &TrigPoly::exp(1, Complex64::new(1.0, 0.0));
        let direct = invert_delta(&TrigPoly::exp(1, Complex64::new(1.0, 0.0)), &r, &TrigPoly::zero()).unwrap();
        assert!(invert_delta_affine(&b, &r, &TrigPoly::zero()).unwrap().max_diff(&direct) < 1e-15);
        assert!(invert_delta_affine(&TrigPoly::zero(), &r, &TrigPoly::zero()).is_err());
    }

    fn arb_case() -> impl Strategy<Value = (RotationNumber, TrigPoly)> {
        (3i64..16, prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12)).prop_filter_map(
            "need a valid p",
            |(q, cs)| {
                let r = (1..q).filter_map(|p| RotationNumber::new(p, q).ok()).next_back()?;
                let mut a = TrigPoly::zero();
                for (l, &(x, y)) in cs.iter().enumerate() {
                    a += &TrigPoly::cos(l as i64, x);
                    a += &TrigPoly::sin(l as i64, y);
                }
                Some((r, a))
            },
        )
    }

    proptest! {
        #[test]
        fn operator_identities((r, a) in arb_case()) {
            let mu = |x: &TrigPoly| apply_operator(x, Operator::Average, &r);
            let scale = a.max_abs().max(1.0);
            prop_assert!(mu(&apply_operator(&a, Operator::Shift, &r)).max_diff(&mu(&a)) <= 1e-12 * scale);
            prop_assert!(mu(&apply_operator(&a, Operator::Sum, &r)).max_diff(&mu(&a).scale(2.0)) <= 1e-12 * scale);
            prop_assert!(mu(&apply_operator(&a, Operator::Diff, &r)).max_abs() <= 1e-12 * scale);
            prop_assert!(mu(&mu(&a)).max_diff(&mu(&a)) <= 1e-12 * scale);
            prop_assert!(apply_operator(&a, Operator::Diff, &r).degree() <= a.degree());
        }

        #[test]
        fn delta_inversion_round_trip((r, a) in arb_case()) {
            let b = &a - &apply_operator(&a, Operator::Average, &r);
            let x = invert_delta(&b, &r, &TrigPoly::zero()).unwrap();
            let back = apply_operator(&x, Operator::Diff, &r);
            prop_assert!(back.max_diff(&b) <= 1e-12 * b.max_abs().max(1e-300));
            let bound = 1.0 / (Complex64::from_polar(1.0, 2.0 * PI / r.q() as f64) - 1.0).norm();
            for (l, c) in x.iter() {
                prop_assert!(c.norm() <= b.coeff(l).norm() * bound * (1.0 + 1e-12));
            }
        }
    }
}
