//! Deformations of the unit circle: per-order Fourier data or a Cartesian
//! perturbation `x² + y² = 1 + ε P_1(x, y)`, plus symmetry and degree
//! classification.

mod cartesian;
mod document;

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use cartesian::{support_from_cartesian, BivariatePoly};
pub use document::{DeformationDoc, HarmonicTriple};

use crate::error::{Error, Result};
use crate::fourier::{Tolerances, TrigPoly};

#[derive(Debug, Clone, PartialEq)]
pub enum DeformationSource {
    /// `h_1, h_2, ...`; missing orders are zero.
    Fourier(Vec<TrigPoly>),
    Cartesian(BivariatePoly),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationSpec {
    source: DeformationSource,
    declared_degree: Option<usize>,
}

impl DeformationSpec {
    pub fn fourier(h_orders: Vec<TrigPoly>) -> Self {
        Self { source: DeformationSource::Fourier(h_orders), declared_degree: None }
    }

    pub fn cartesian(p1: BivariatePoly) -> Self {
        Self { source: DeformationSource::Cartesian(p1), declared_degree: None }
    }

    /// The unperturbed circle.
    pub fn circle() -> Self {
        Self::fourier(Vec::new())
    }

    /// Attaches a declared degree `n`, checking `h_k ∈ T_{nk}` for the
    /// supplied Fourier orders (Cartesian specs need `deg P_1 <= n`).
    pub fn with_declared_degree(mut self, n: usize) -> Result<Self> {
        match &self.source {
            DeformationSource::Fourier(h) => {
                if let Some((k, hk)) = h.iter().enumerate().find(|(k, hk)| hk.degree() > n * (k + 1)) {
                    return Err(Error::DegreeMismatch { k: k + 1, degree: hk.degree(), bound: n * (k + 1) });
                }
            }
            DeformationSource::Cartesian(p1) => {
                if p1.degree() > n {
                    return Err(Error::DegreeMismatch { k: 1, degree: p1.degree(), bound: n });
                }
            }
        }
        self.declared_degree = Some(n);
        Ok(self)
    }

    pub fn source(&self) -> &DeformationSource {
        &self.source
    }

    pub fn declared_degree(&self) -> Option<usize> {
        self.declared_degree
    }

    /// Polynomial degree `n`: the declared one, `deg P_1`, or the smallest
    /// `n` with `deg h_k <= n k` over the supplied orders.
    pub fn degree(&self) -> usize {
        if let Some(n) = self.declared_degree {
            return n;
        }
        match &self.source {
            DeformationSource::Cartesian(p1) => p1.degree(),
            DeformationSource::Fourier(h) => {
                h.iter().enumerate().map(|(k, hk)| hk.degree().div_ceil(k + 1)).max().unwrap_or(0)
            }
        }
    }

    /// `h_1..h_K`, padded with zeros for Fourier specs.
    pub fn h_orders(&self, max_order: usize) -> Vec<TrigPoly> {
        match &self.source {
            DeformationSource::Fourier(h) => {
                let mut out: Vec<_> = h.iter().take(max_order).cloned().collect();
                out.resize(max_order, TrigPoly::zero());
                out
            }
            DeformationSource::Cartesian(p1) => support_from_cartesian(p1, max_order),
        }
    }

    /// Fourier spec with the same first `max_order` orders.
    pub fn to_fourier(&self, max_order: usize) -> Self {
        let mut h = self.h_orders(max_order);
        while h.last().is_some_and(TrigPoly::is_zero) {
            h.pop();
        }
        Self { source: DeformationSource::Fourier(h), declared_degree: self.declared_degree }
    }

    /// Support function `1 + sum_{k<=K} ε^k h_k` with its first two
    /// derivatives, evaluated pointwise.
    pub fn support_at(h_orders: &[TrigPoly], epsilon: f64, psi: f64) -> (f64, f64, f64) {
        let mut out = (1.0, 0.0, 0.0);
        let mut power = 1.0;
        for hk in h_orders {
            power *= epsilon;
            let (v, d, dd) = eval_with_derivatives(hk, psi);
            out.0 += power * v;
            out.1 += power * d;
            out.2 += power * dd;
        }
        out
    }
}

/// `(f, f', f'')` at `t` for a real trigonometric polynomial.
pub(crate) fn eval_with_derivatives(f: &TrigPoly, t: f64) -> (f64, f64, f64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    let mut dd = Complex64::new(0.0, 0.0);
    for (l, c) in f.iter() {
        let e = c * Complex64::from_polar(1.0, l as f64 * t);
        let il = Complex64::new(0.0, l as f64);
        v += e;
        d += e * il;
        dd += e * il * il;
    }
    (v.re, d.re, dd.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    None,
    Centrally,
    AntiCentrally,
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Centrally => "centrally",
            Self::AntiCentrally => "anti_centrally",
        })
    }
}

/// Which symmetry conditions hold; both can hold at once (e.g. zero or
/// constant-free even-order data).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SymmetryFlags {
    pub central: bool,
    pub anti_central: bool,
}

impl SymmetryFlags {
    pub fn classes(&self) -> Vec<SymmetryClass> {
        let mut out = vec![SymmetryClass::None];
        if self.central {
            out.push(SymmetryClass::Centrally);
        }
        if self.anti_central {
            out.push(SymmetryClass::AntiCentrally);
        }
        out
    }
}

/// Harmonic parity of every order. Coefficients below the zero threshold of
/// each `h_k` are ignored.
pub fn symmetry_flags(h_orders: &[TrigPoly], tol: &Tolerances) -> SymmetryFlags {
    let mut flags = SymmetryFlags { central: true, anti_central: true };
    for (idx, hk) in h_orders.iter().enumerate() {
        let k = idx + 1;
        let threshold = tol.zero_threshold(hk.max_abs());
        for (l, c) in hk.iter() {
            if c.norm() <= threshold {
                continue;
            }
            let odd_harmonic = l.rem_euclid(2) == 1;
            if odd_harmonic {
                flags.central = false;
            }
            if odd_harmonic != (k % 2 == 1) {
                flags.anti_central = false;
            }
        }
    }
    flags
}

/// Symmetry flags of a spec; Cartesian specs use the parity of `P_1`.
pub fn spec_symmetry_flags(spec: &DeformationSpec, max_order: usize, tol: &Tolerances) -> SymmetryFlags {
    match spec.source() {
        DeformationSource::Cartesian(p1) if p1.is_even() || p1.is_odd() => {
            SymmetryFlags { central: p1.is_even(), anti_central: p1.is_odd() }
        }
        _ => symmetry_flags(&spec.h_orders(max_order), tol),
    }
}

/// A single class; when both hold, the one with the larger exponent for
/// `(n, q)` wins, and `Centrally` when tied or when no `(n, q)` is given.
pub fn detect_symmetry(spec: &DeformationSpec, max_order: usize) -> SymmetryClass {
    classify(spec_symmetry_flags(spec, max_order, &Tolerances::default()), None)
}

pub fn classify(flags: SymmetryFlags, nq: Option<(usize, i64)>) -> SymmetryClass {
    match (flags.central, flags.anti_central) {
        (true, true) => match nq {
            Some((n, q))
                if chi_exponent(SymmetryClass::AntiCentrally, n, q).ok()
                    > chi_exponent(SymmetryClass::Centrally, n, q).ok() =>
            {
                SymmetryClass::AntiCentrally
            }
            _ => SymmetryClass::Centrally,
        },
        (true, false) => SymmetryClass::Centrally,
        (false, true) => SymmetryClass::AntiCentrally,
        (false, false) => SymmetryClass::None,
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

/// The guaranteed-persistence exponent χ: the caustic persists to order
/// `χ - 1` for polynomial deformations of degree `n`.
pub fn chi_exponent(sym: SymmetryClass, n: usize, q: i64) -> Result<usize> {
    if n == 0 {
        return Err(Error::Precondition("degree n must be at least 1".into()));
    }
    if q < 3 {
        return Err(Error::Precondition(format!("q = {q} must be at least 3")));
    }
    let n = n as i64;
    let odd_q = q % 2 == 1;
    let chi = match sym {
        SymmetryClass::AntiCentrally if odd_q => 1 + 2 * ceil_div(q - n, 2 * n),
        SymmetryClass::AntiCentrally => 2 * ceil_div(q, 2 * n),
        SymmetryClass::Centrally if odd_q => ceil_div(2 * q, n),
        _ => ceil_div(q, n),
    };
    Ok(chi.max(1) as usize)
}

/// True iff `deg h_k <= n k` for every supplied order.
pub fn degree_check(h_orders: &[TrigPoly], n: usize) -> bool {
    h_orders.iter().enumerate().all(|(k, hk)| hk.degree() <= n * (k + 1))
}

/// Parses a deformation document from JSON text.
pub fn parse_spec(text: &str) -> Result<DeformationSpec> {
    let doc: DeformationDoc = serde_json::from_str(text)?;
    doc.into_spec()
}

/// Reads and validates a deformation document from disk.
pub fn load_spec(path: impl AsRef<Path>) -> Result<DeformationSpec> {
    parse_spec(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_examples() {
        assert_eq!(chi_exponent(SymmetryClass::None, 3, 7).unwrap(), 3);
        assert_eq!(chi_exponent(SymmetryClass::AntiCentrally, 3, 8).unwrap(), 4);
        assert_eq!(chi_exponent(SymmetryClass::Centrally, 3, 7).unwrap(), 5);
        assert_eq!(chi_exponent(SymmetryClass::AntiCentrally, 3, 7).unwrap(), 3);
        assert_eq!(chi_exponent(SymmetryClass::AntiCentrally, 3, 5).unwrap(), 3);
        assert_eq!(chi_exponent(SymmetryClass::Centrally, 4, 5).unwrap(), 3);
        assert_eq!(chi_exponent(SymmetryClass::Centrally, 4, 7).unwrap(), 4);
        assert!(chi_exponent(SymmetryClass::None, 0, 7).is_err());
        assert!(chi_exponent(SymmetryClass::None, 2, 2).is_err());
    }

    #[test]
    fn ceil_handles_negative_numerators() {
        assert_eq!(ceil_div(-2, 6), 0);
        assert_eq!(ceil_div(-7, 6), -1);
        assert_eq!(ceil_div(7, 6), 2);
        // n > q: 1 + 2 ceil((5 - 6) / 12) = 1
        assert_eq!(chi_exponent(SymmetryClass::AntiCentrally, 6, 5).unwrap(), 1);
    }

    #[test]
    fn symmetry_examples() {
        let odd = DeformationSpec::cartesian(BivariatePoly::from_terms([(0, 3, 1.0)]));
        assert_eq!(detect_symmetry(&odd, 4), SymmetryClass::AntiCentrally);
        let even = DeformationSpec::cartesian(BivariatePoly::from_terms([(4, 0, 1.0), (0, 2, 1.0)]));
        assert_eq!(detect_symmetry(&even, 4), SymmetryClass::Centrally);
        let mixed = DeformationSpec::fourier(vec![&TrigPoly::cos(1, 1.0) + &TrigPoly::cos(2, 1.0)]);
        assert_eq!(detect_symmetry(&mixed, 1), SymmetryClass::None);
        let flags = symmetry_flags(&[], &Tolerances::default());
        assert!(flags.central && flags.anti_central);
    }

    #[test]
    fn cartesian_parity_agrees_with_harmonics() {
        let tol = Tolerances::default();
        for p1 in [
            BivariatePoly::from_terms([(0, 3, -1.0), (1, 2, 0.3)]),
            BivariatePoly::from_terms([(0, 4, -1.0), (2, 0, 0.5)]),
        ] {
            let h = support_from_cartesian(&p1, 5);
            let flags = symmetry_flags(&h, &tol);
            assert_eq!(flags.central, p1.is_even());
            assert_eq!(flags.anti_central, p1.is_odd());
        }
    }

    #[test]
    fn degree_examples() {
        assert!(degree_check(&[TrigPoly::cos(3, 1.0), TrigPoly::cos(6, 1.0)], 3));
        assert!(!degree_check(&[TrigPoly::cos(4, 1.0)], 3));
        let p1 = BivariatePoly::from_terms([(2, 1, 1.0), (0, 3, -0.5)]);
        assert!(degree_check(&support_from_cartesian(&p1, 5), 3));
        let bad = DeformationSpec::fourier(vec![TrigPoly::cos(4, 1.0)]).with_declared_degree(3);
        assert!(matches!(bad, Err(Error::DegreeMismatch { k: 1, .. })));
    }

    #[test]
    fn support_pointwise() {
        let h = [TrigPoly::cos(2, 1.0)];
        let (v, d, dd) = DeformationSpec::support_at(&h, 0.1, 0.3);
        assert!((v - (1.0 + 0.1 * 0.6f64.cos())).abs() < 1e-15);
        assert!((d + 0.2 * 0.6f64.sin()).abs() < 1e-15);
        assert!((dd + 0.4 * 0.6f64.cos()).abs() < 1e-15);
    }
}
