use std::f64::consts::TAU;
use std::fmt::Write as _;

use super::fit::{geometric_sweep, SweepPoint};
use super::{billiard_step_detail, SupportEvaluator};
use crate::error::{Error, Result};
use crate::expansions::ExpansionState;
use crate::fourier::TrigPoly;

/// Default number of sample points in `t`.
pub const DEFAULT_RESIDUAL_GRID: usize = 256;

/// `1e-2 ... 1e-5`, 7 geometric points.
pub fn default_eps_sweep() -> Vec<f64> {
    geometric_sweep(1e-2, 1e-5, 7).expect("default sweep is valid")
}

/// Uniform grid of `n` points on `[0, 2π)`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// `ε`-weighted sums of the solved deviations `θ_k`, `φ_k`, `ψ_k`.
struct Deviations {
    omega: f64,
    theta: TrigPoly,
    phi: TrigPoly,
    psi: TrigPoly,
}

impl Deviations {
    fn new(state: &ExpansionState, epsilon: f64) -> Self {
        let mut out = Self {
            omega: state.rot().omega(),
            theta: TrigPoly::zero(),
            phi: TrigPoly::zero(),
            psi: TrigPoly::zero(),
        };
        let mut power = 1.0;
        for k in 0..state.order() {
            power *= epsilon;
            out.theta += &state.thetas()[k].scale(power);
            out.phi += &state.phis()[k].scale(power);
            out.psi += &state.psis()[k].scale(power);
        }
        out
    }

    /// `(ψ(t), θ(t), dθ(t))` with `dθ = θ - ω/2`.
    fn at(&self, t: f64) -> (f64, f64, f64) {
        let dtheta = self.theta.eval(t);
        (t + self.psi.eval(t), 0.5 * self.omega + dtheta, dtheta)
    }

    fn phi(&self, t: f64) -> f64 {
        t - 0.5 * self.omega + self.phi.eval(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSamples {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub max_abs: f64,
    /// Rounding-level estimate of the error in `values`.
    pub noise_floor: f64,
}

/// `σ{h'∘ψ sin θ} - δ{h∘ψ cos θ}` on `t_grid`, using the solved orders of
/// `state` and the table of `ev`.
///
/// Every term is arranged to be of size `ε`, so the rounding error is about
/// `ε` times machine precision rather than machine precision.
pub fn residual_function(state: &ExpansionState, ev: &SupportEvaluator, t_grid: &[f64]) -> ResidualSamples {
    let dev = Deviations::new(state, ev.epsilon());
    let omega = dev.omega;
    let mut values = Vec::with_capacity(t_grid.len());
    let mut noise_floor: f64 = 0.0;
    for &t in t_grid {
        let (psi, theta, dtheta) = dev.at(t);
        let (psi_n, theta_n, dtheta_n) = dev.at(t + omega);
        let (dh, d, dd) = ev.eval_deviation(psi);
        let (dh_n, d_n, dd_n) = ev.eval_deviation(psi_n);
        let (s, c) = theta.sin_cos();
        let (s_n, c_n) = theta_n.sin_cos();
        let sum = d_n * s_n + d * s;
        let diff_h = dh_n * c_n - dh * c;
        let diff_cos = -2.0 * (0.5 * (theta_n + theta)).sin() * (0.5 * (dtheta_n - dtheta)).sin();
        values.push(sum - diff_h - diff_cos);
        let magnitude = (d_n * s_n).abs() + (d * s).abs() + (dh_n * c_n).abs() + (dh * c).abs() + diff_cos.abs();
        let argument = (psi.abs() + psi_n.abs()) * (d.abs() + dd.abs() + d_n.abs() + dd_n.abs());
        noise_floor = noise_floor.max(f64::EPSILON * (4.0 * magnitude + argument));
    }
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    ResidualSamples { t: t_grid.to_vec(), values, max_abs, noise_floor }
}

/// `"t,residual"` rows.
pub fn residual_csv(samples: &ResidualSamples) -> String {
    let mut out = String::from("t,residual\n");
    for (t, r) in samples.t.iter().zip(&samples.values) {
        let _ = writeln!(out, "{t},{r}");
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceSamples {
    pub t: Vec<f64>,
    /// `φ_1 - φ(t + ω)`.
    pub horizontal: Vec<f64>,
    /// `λ_1 - λ(t + ω)`.
    pub vertical: Vec<f64>,
    pub max_horizontal: f64,
    pub max_vertical: f64,
}

/// Gap between the billiard image of the approximate caustic line `c(t)`
/// and the line `c(t + ω)`.
pub fn invariance_residual(state: &ExpansionState, ev: &SupportEvaluator, t_grid: &[f64]) -> Result<InvarianceSamples> {
    let dev = Deviations::new(state, ev.epsilon());
    let omega = dev.omega;
    let line = |t: f64| {
        let (psi, theta, _) = dev.at(t);
        let (h, d, _) = ev.eval(psi);
        let (s, c) = theta.sin_cos();
        (super::LineCoords { phi: dev.phi(t), lambda: h * c - d * s }, theta)
    };
    let mut horizontal = Vec::with_capacity(t_grid.len());
    let mut vertical = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (start, theta) = line(t);
        let step = billiard_step_detail(start, ev, Some(theta))?;
        let (next, _) = line(t + omega);
        // φ(t + ω) - φ(t) = 2θ(t) holds exactly for the series
        horizontal.push(2.0 * (step.theta - theta));
        vertical.push(step.image.lambda - next.lambda);
    }
    let max_of = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(InvarianceSamples {
        t: t_grid.to_vec(),
        max_horizontal: max_of(&horizontal),
        max_vertical: max_of(&vertical),
        horizontal,
        vertical,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionDiagnostics {
    /// `A(t) = 2q μ{h∘ψ sin θ}` on the grid.
    pub action: Vec<f64>,
    pub action_mean: f64,
    /// `max A - min A`.
    pub action_spread: f64,
    /// `max |μ{h'∘ψ sin θ}|`.
    pub moment_max: f64,
    /// `max |μ{θ} - π p / q|`.
    pub theta_mean_deviation: f64,
}

/// Periodic-orbit identities along the approximate caustic; `μ` is the
/// `q`-point average over `t, t + ω, ..., t + (q-1)ω`.
pub fn action_and_identities(ev: &SupportEvaluator, state: &ExpansionState, t_grid: &[f64]) -> ActionDiagnostics {
    let dev = Deviations::new(state, ev.epsilon());
    let rot = state.rot();
    let q = rot.q() as usize;
    let mut action = Vec::with_capacity(t_grid.len());
    let mut moment_max: f64 = 0.0;
    let mut theta_mean_deviation: f64 = 0.0;
    for &t in t_grid {
        let (mut a, mut m, mut dth) = (0.0, 0.0, 0.0);
        for j in 0..q {
            let (psi, theta, dtheta) = dev.at(t + j as f64 * rot.omega());
            let (h, d, _) = ev.eval(psi);
            let s = theta.sin();
            a += h * s;
            m += d * s;
            dth += dtheta;
        }
        action.push(2.0 * a);
        moment_max = moment_max.max((m / q as f64).abs());
        theta_mean_deviation = theta_mean_deviation.max((dth / q as f64).abs());
    }
    let (lo, hi) = action.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a)));
    let action_mean = action.iter().sum::<f64>() / action.len().max(1) as f64;
    ActionDiagnostics { action, action_mean, action_spread: hi - lo, moment_max, theta_mean_deviation }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausticSamples {
    pub phi: Vec<f64>,
    /// Caustic support function `g(φ(t)) = λ(t)`.
    pub g: Vec<f64>,
    pub min_g: f64,
    /// Minimum of the finite-difference radius of curvature `g + g''`.
    pub min_curvature: f64,
}

/// Samples of the approximate caustic as a support function over `φ`.
/// `t_grid` must be increasing and cover one period.
pub fn reconstruct_caustic(state: &ExpansionState, ev: &SupportEvaluator, t_grid: &[f64]) -> Result<CausticSamples> {
    if state.order() == 0 {
        return Err(Error::Precondition("caustic reconstruction needs at least one solved order".into()));
    }
    let dev = Deviations::new(state, ev.epsilon());
    let mut phi = Vec::with_capacity(t_grid.len());
    let mut g = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (psi, theta, _) = dev.at(t);
        let (h, d, _) = ev.eval(psi);
        let (s, c) = theta.sin_cos();
        phi.push(dev.phi(t));
        g.push(h * c - d * s);
    }
    for i in 1..phi.len() {
        if phi[i] <= phi[i - 1] {
            return Err(Error::NotAGraph { t: t_grid[i] });
        }
    }
    let n = phi.len();
    let mut min_curvature = f64::INFINITY;
    if n >= 3 {
        for i in 0..n {
            let (prev, next) = ((i + n - 1) % n, (i + 1) % n);
            let phi_prev = phi[prev] - if i == 0 { TAU } else { 0.0 };
            let phi_next = phi[next] + if i == n - 1 { TAU } else { 0.0 };
            let (h1, h2) = (phi[i] - phi_prev, phi_next - phi[i]);
            let second = 2.0 * (h1 * g[next] - (h1 + h2) * g[i] + h2 * g[prev]) / (h1 * h2 * (h1 + h2));
            min_curvature = min_curvature.min(g[i] + second);
        }
    }
    let min_g = g.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CausticSamples { phi, g, min_g, min_curvature })
}

/// Maximum residual at each ε of `eps`, with the table truncated at the
/// orders supplied in `h_orders`.
pub fn residual_sweep(
    state: &ExpansionState,
    h_orders: &[TrigPoly],
    eps: &[f64],
    grid: usize,
) -> Result<Vec<SweepPoint>> {
    let t_grid = uniform_grid(grid);
    eps.iter()
        .map(|&epsilon| {
            let ev = SupportEvaluator::new(h_orders.to_vec(), epsilon)?;
            let r = residual_function(state, &ev, &t_grid);
            Ok(SweepPoint { epsilon, max_residual: r.max_abs, noise_floor: r.noise_floor })
        })
        .collect()
}
