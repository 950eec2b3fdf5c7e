use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// A reduced rational rotation number `p/q` in `(0, 1/2)`.
///
/// Caches the frequency `omega = 2 pi p / q` and `c = cos(omega / 2)`,
/// `s = sin(omega / 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationNumber {
    p: i64,
    q: i64,
    omega: f64,
    c: f64,
    s: f64,
}

pub(crate) fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a.abs()
}

impl RotationNumber {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p <= 0 || q <= 0 {
            return Err(Error::InvalidRotation { p, q, reason: "p and q must be positive" });
        }
        if q < 3 {
            return Err(Error::InvalidRotation { p, q, reason: "q must be at least 3" });
        }
        if 2 * p >= q {
            return Err(Error::InvalidRotation { p, q, reason: "p/q must be below 1/2" });
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidRotation { p, q, reason: "p/q must be reduced" });
        }
        let omega = 2.0 * PI * p as f64 / q as f64;
        let (s, c) = (omega / 2.0).sin_cos();
        Ok(Self { p, q, omega, c, s })
    }

    /// All reduced `p/q < 1/2` with `q` in `q_lo..=q_hi`, ordered by `(q, p)`.
    pub fn enumerate(q_lo: i64, q_hi: i64, p_one_only: bool) -> Vec<Self> {
        let mut out = Vec::new();
        for q in q_lo.max(3)..=q_hi {
            for p in 1..q {
                if 2 * p >= q || (p_one_only && p != 1) {
                    continue;
                }
                if let Ok(r) = Self::new(p, q) {
                    out.push(r);
                }
            }
        }
        out
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// `p / q` as a float.
    pub fn rho(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// True when `l` is a multiple of `q` (a resonant harmonic).
    pub fn is_resonant(&self, l: i64) -> bool {
        l.rem_euclid(self.q) == 0
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_rotations() {
        assert!(RotationNumber::new(2, 10).is_err());
        assert!(RotationNumber::new(1, 2).is_err());
        assert!(RotationNumber::new(3, 5).is_err());
        assert!(RotationNumber::new(0, 5).is_err());
        assert!(RotationNumber::new(1, 3).is_ok());
    }

    #[test]
    fn caches_half_angle() {
        let r = RotationNumber::new(1, 4).unwrap();
        assert!((r.c() - (PI / 4.0).cos()).abs() < 1e-16);
        assert!(r.s() > 0.0);
    }

    #[test]
    fn enumerates_reduced_fractions() {
        let all = RotationNumber::enumerate(3, 7, false);
        let pairs: Vec<_> = all.iter().map(|r| (r.p(), r.q())).collect();
        assert_eq!(pairs, vec![(1, 3), (1, 4), (1, 5), (2, 5), (1, 6), (1, 7), (2, 7), (3, 7)]);
        assert_eq!(RotationNumber::enumerate(3, 7, true).len(), 5);
    }
}
