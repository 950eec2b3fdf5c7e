use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Maximum residual at one ε together with its rounding-level floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub max_residual: f64,
    pub noise_floor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    /// Least-squares slope of `log r` against `log ε`; `None` when fewer
    /// than three points rise above the noise floor.
    pub slope: Option<f64>,
    pub r_squared: Option<f64>,
    /// Number of points used in the fit.
    pub used: usize,
}

impl ScalingFit {
    /// The residual sits at the noise floor: the caustic persists beyond
    /// what double precision can resolve.
    pub fn beyond_measurable(&self) -> bool {
        self.slope.is_none()
    }
}

/// `n` geometrically spaced values from `from` to `to` inclusive.
pub fn geometric_sweep(from: f64, to: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(from > 0.0 && to > 0.0) {
        return Err(Error::Fit("a sweep needs at least 2 positive endpoints"));
    }
    let (a, b) = (from.ln(), to.ln());
    Ok((0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect())
}

/// Fit on `(ε, max residual)` pairs, with the floor at machine precision.
pub fn scaling_fit(pairs: &[(f64, f64)]) -> Result<ScalingFit> {
    let points: Vec<_> = pairs
        .iter()
        .map(|&(epsilon, max_residual)| SweepPoint { epsilon, max_residual, noise_floor: f64::EPSILON })
        .collect();
    scaling_fit_samples(&points)
}

/// Points whose residual is within a factor 100 of their noise floor are
/// left out of the fit.
pub fn scaling_fit_samples(points: &[SweepPoint]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::Fit("at least 3 points are required"));
    }
    if points.iter().any(|p| !(p.epsilon > 0.0)) {
        return Err(Error::Fit("epsilon values must be positive"));
    }
    let lo = points.iter().map(|p| p.epsilon).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.epsilon).fold(0.0, f64::max);
    if hi / lo < 99.999 {
        return Err(Error::Fit("epsilon values must span at least two decades"));
    }
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.max_residual.is_finite() && p.max_residual > 1e2 * p.noise_floor)
        .map(|p| (p.epsilon.ln(), p.max_residual.ln()))
        .collect();
    if usable.len() < 3 {
        return Ok(ScalingFit { slope: None, r_squared: None, used: usable.len() });
    }
    let (slope, r2) = least_squares(&usable);
    Ok(ScalingFit { slope: Some(slope), r_squared: Some(r2), used: usable.len() })
}

fn least_squares(xy: &[(f64, f64)]) -> (f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, r2)
}

/// `"epsilon,max_residual,slope_window"` rows; the window slope is taken
/// against the previous row.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("epsilon,max_residual,slope_window\n");
    for (i, p) in points.iter().enumerate() {
        let window = match i.checked_sub(1).map(|j| points[j]) {
            Some(prev) if prev.max_residual > 0.0 && p.max_residual > 0.0 => {
                ((p.max_residual.ln() - prev.max_residual.ln()) / (p.epsilon.ln() - prev.epsilon.ln())).to_string()
            }
            _ => String::new(),
        };
        let _ = writeln!(out, "{},{},{}", p.epsilon, p.max_residual, window);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_slopes() {
        let eps = geometric_sweep(1e-2, 1e-5, 7).unwrap();
        let cubic: Vec<_> = eps.iter().map(|&e| (e, e.powi(3))).collect();
        assert!((scaling_fit(&cubic).unwrap().slope.unwrap() - 3.0).abs() < 1e-6);
        let eps = geometric_sweep(1e-2, 1e-6, 9).unwrap();
        let quad: Vec<_> = eps.iter().map(|&e| (e, 5.0 * e * e + 1e-16)).collect();
        assert!((scaling_fit(&quad).unwrap().slope.unwrap() - 2.0).abs() < 1e-2);
    }

    #[test]
    fn preconditions() {
        assert!(scaling_fit(&[(1e-2, 1e-4), (1e-4, 1e-8)]).is_err());
        assert!(scaling_fit(&[(1e-2, 1e-4), (5e-3, 1e-5), (1e-3, 1e-6)]).is_err());
        let floor: Vec<_> = [1e-2, 1e-3, 1e-4].iter().map(|&e| (e, 1e-17)).collect();
        assert!(scaling_fit(&floor).unwrap().beyond_measurable());
    }

    #[test]
    fn csv_layout() {
        let pts = [
            SweepPoint { epsilon: 1e-2, max_residual: 1e-4, noise_floor: 0.0 },
            SweepPoint { epsilon: 1e-3, max_residual: 1e-6, noise_floor: 0.0 },
        ];
        let csv = sweep_csv(&pts);
        let rows: Vec<_> = csv.lines().collect();
        assert_eq!(rows[0], "epsilon,max_residual,slope_window");
        assert_eq!(rows[1], "0.01,0.0001,");
        assert!(rows[2].starts_with("0.001,0.000001,2"));
    }
}
