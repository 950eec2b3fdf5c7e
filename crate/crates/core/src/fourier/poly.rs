use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Tolerances;
use crate::error::{Error, Result};

/// A finite Fourier series `sum_l c_l e^{i l t}` of a 2π-periodic function.
///
/// Harmonics are stored sparsely by signed index. When `real` is set the
/// coefficients satisfy `c_{-l} = conj(c_l)` and [`TrigPoly::eval`] returns
/// the (real) value of the series.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    coeffs: BTreeMap<i64, Complex64>,
    real: bool,
}

impl Default for TrigPoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl TrigPoly {
    /// The zero polynomial (real).
    pub fn zero() -> Self {
        Self { coeffs: BTreeMap::new(), real: true }
    }

    pub fn constant(value: f64) -> Self {
        Self::from_coeffs([(0, Complex64::new(value, 0.0))], true)
    }

    /// `amp * cos(l t)`.
    pub fn cos(l: i64, amp: f64) -> Self {
        if l == 0 {
            return Self::constant(amp);
        }
        let half = Complex64::new(amp / 2.0, 0.0);
        Self::from_coeffs([(l, half), (-l, half)], true)
    }

    /// `amp * sin(l t)`.
    pub fn sin(l: i64, amp: f64) -> Self {
        if l == 0 {
            return Self::zero();
        }
        let half = Complex64::new(0.0, -amp / 2.0);
        Self::from_coeffs([(l, half), (-l, half.conj())], true)
    }

    /// The single complex exponential `amp * e^{i l t}` (not real).
    pub fn exp(l: i64, amp: Complex64) -> Self {
        Self::from_coeffs([(l, amp)], false)
    }

    /// Builds a polynomial from `(l, c_l)` pairs; repeated indices are summed
    /// and exact zeros dropped. No symmetry check is made here, see
    /// [`TrigPoly::normalize`].
    pub fn from_coeffs<I>(iter: I, real: bool) -> Self
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut coeffs = BTreeMap::new();
        for (l, c) in iter {
            *coeffs.entry(l).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c: &mut Complex64| *c != Complex64::new(0.0, 0.0));
        Self { coeffs, real }
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, l: i64) -> Complex64 {
        self.coeffs.get(&l).copied().unwrap_or_default()
    }

    /// Iterates over stored harmonics in increasing order of `l`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&l, &c)| (l, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|l|` among stored harmonics; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Mean value over a period (the zeroth harmonic).
    pub fn mean(&self) -> Complex64 {
        self.coeff(0)
    }

    /// Largest coefficient difference against `other`, over the union of supports.
    pub fn max_diff(&self, other: &TrigPoly) -> f64 {
        (self - other).max_abs()
    }

    /// Keeps only the harmonics selected by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(i64) -> bool) -> Self {
        Self {
            coeffs: self.coeffs.iter().filter(|(&l, _)| keep(l)).map(|(&l, &c)| (l, c)).collect(),
            real: self.real,
        }
    }

    /// Multiplies each coefficient by `f(l)`.
    pub fn map_coeffs(&self, real: bool, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|(&l, &c)| (l, f(l, c))), real)
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map_coeffs(self.real, |_, c| c * factor)
    }

    /// Prunes negligible harmonics and, for real polynomials, enforces the
    /// Hermitian symmetry by averaging `c_l` with `conj(c_{-l})`.
    ///
    /// A harmonic is negligible when `|c_l| <= zero * max|c| ` or below the
    /// absolute floor. A real polynomial whose asymmetry exceeds
    /// `1e3 * zero` (relative) is rejected as corrupted.
    pub fn normalize(&self, tol: &Tolerances) -> Result<Self> {
        let scale = self.max_abs();
        let mut coeffs = self.coeffs.clone();
        if self.real {
            let limit = 1e3 * tol.zero * scale.max(tol.abs_floor);
            let positive: Vec<i64> = coeffs.keys().copied().filter(|&l| l >= 0).collect();
            let negative: Vec<i64> = coeffs.keys().copied().filter(|&l| l < 0).collect();
            for l in positive.into_iter().chain(negative.into_iter().map(|l| -l)) {
                let a = self.coeff(l);
                let b = self.coeff(-l).conj();
                let asymmetry = (a - b).norm();
                if asymmetry > limit {
                    return Err(Error::NonHermitian { harmonic: l, asymmetry });
                }
                let avg = (a + b) * 0.5;
                if l == 0 {
                    coeffs.insert(0, Complex64::new(avg.re, 0.0));
                } else {
                    coeffs.insert(l, avg);
                    coeffs.insert(-l, avg.conj());
                }
            }
        }
        let cutoff = (tol.zero * scale).max(tol.abs_floor);
        coeffs.retain(|_, c| c.norm() > cutoff);
        Ok(Self { coeffs, real: self.real })
    }

    /// `c_l -> i l c_l`.
    pub fn derivative(&self) -> Self {
        self.map_coeffs(self.real, |l, c| c * Complex64::new(0.0, l as f64))
    }

    /// `j`-th derivative.
    pub fn nth_derivative(&self, j: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..j {
            out = out.derivative();
        }
        out
    }

    /// Zero-mean antiderivative; the zeroth harmonic is ignored.
    pub fn antiderivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .filter(|(&l, _)| l != 0)
                .map(|(&l, &c)| (l, c / Complex64::new(0.0, l as f64))),
            self.real,
        )
    }

    /// Complex value `sum_l c_l e^{i l t}`.
    pub fn eval_complex(&self, t: f64) -> Complex64 {
        self.coeffs.iter().map(|(&l, &c)| c * Complex64::from_polar(1.0, l as f64 * t)).sum()
    }

    /// Real value of the series at `t` (the real part for non-real polynomials).
    pub fn eval(&self, t: f64) -> f64 {
        if !self.real {
            return self.eval_complex(t).re;
        }
        // pair +l and -l: c e^{ilt} + conj(c) e^{-ilt} = 2 Re(c e^{ilt})
        let mut acc = self.coeff(0).re;
        for (&l, &c) in self.coeffs.range(1..) {
            let (s, co) = (l as f64 * t).sin_cos();
            acc += 2.0 * (c.re * co - c.im * s);
        }
        acc
    }

    /// Full convolution of coefficients.
    pub fn multiply(&self, other: &TrigPoly) -> Self {
        let real = self.real && other.real;
        if self.is_zero() || other.is_zero() {
            return Self { coeffs: BTreeMap::new(), real };
        }
        let (a_lo, a_hi) = self.bounds();
        let (b_lo, b_hi) = other.bounds();
        let lo = a_lo + b_lo;
        let width = (a_hi + b_hi - lo + 1) as usize;
        let mut buf = vec![Complex64::new(0.0, 0.0); width];
        for (&la, &ca) in &self.coeffs {
            for (&lb, &cb) in &other.coeffs {
                buf[(la + lb - lo) as usize] += ca * cb;
            }
        }
        Self::from_coeffs(buf.into_iter().enumerate().map(|(i, c)| (lo + i as i64, c)), real)
    }

    /// `self^n`, with `self^0 = 1`.
    pub fn powi(&self, n: u32) -> Self {
        let mut out = Self::constant(1.0);
        for _ in 0..n {
            out = out.multiply(self);
        }
        out
    }

    fn bounds(&self) -> (i64, i64) {
        let lo = *self.coeffs.keys().next().unwrap_or(&0);
        let hi = *self.coeffs.keys().next_back().unwrap_or(&0);
        (lo, hi)
    }

    /// CSV export, one harmonic per row with header `l,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,re,im\n");
        for (l, c) in self.iter() {
            let _ = writeln!(out, "{},{},{}", l, c.re, c.im);
        }
        out
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        TrigPoly::from_coeffs(self.iter().chain(rhs.iter()), self.real && rhs.real)
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;
    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        TrigPoly::from_coeffs(self.iter().chain(rhs.iter().map(|(l, c)| (l, -c))), self.real && rhs.real)
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        self.multiply(rhs)
    }
}

impl Mul<f64> for &TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: f64) -> TrigPoly {
        self.scale(rhs)
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        self.scale(-1.0)
    }
}

impl AddAssign<&TrigPoly> for TrigPoly {
    fn add_assign(&mut self, rhs: &TrigPoly) {
        for (l, c) in rhs.iter() {
            *self.coeffs.entry(l).or_default() += c;
        }
        self.coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        self.real &= rhs.real;
    }
}

impl SubAssign<&TrigPoly> for TrigPoly {
    fn sub_assign(&mut self, rhs: &TrigPoly) {
        for (l, c) in rhs.iter() {
            *self.coeffs.entry(l).or_default() -= c;
        }
        self.coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        self.real &= rhs.real;
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrigPolyDoc {
    real: bool,
    coeffs: Vec<(i64, f64, f64)>,
}

impl Serialize for TrigPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TrigPolyDoc { real: self.real, coeffs: self.iter().map(|(l, c)| (l, c.re, c.im)).collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = TrigPolyDoc::deserialize(deserializer)?;
        Ok(TrigPoly::from_coeffs(doc.coeffs.into_iter().map(|(l, re, im)| (l, Complex64::new(re, im))), doc.real))
    }
}
