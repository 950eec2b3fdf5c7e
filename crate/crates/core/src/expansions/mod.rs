//! Order-by-order coefficients of `sin θ`, `cos θ`, `h∘ψ`, `h'∘ψ` and the
//! `Q_k` / `R̃_k` pair driving the persistence recursion.
//!
//! The zeroth-order side and normal functions `φ_0 = t - ω/2`, `ψ_0 = t` are
//! affine and never stored; every stored `φ_k`, `ψ_k`, `θ_k` with `k >= 1` is
//! a periodic deviation, and compositions are expanded around `ψ_0 = t`.

mod multi_index;

use std::collections::HashMap;

pub use multi_index::{enumerate_multi_indices, enumerate_multi_indices_from, MultiIndex, MultiIndexCache};

use crate::error::{Error, Result};
use crate::fourier::{RotationNumber, Tolerances, TrigPoly};

/// Cached sums `P_{j,w} = sum_{|α| = j, ||α|| = w} ψ^α / α!`, i.e. the
/// `ε^w` coefficient of `(ψ - t)^j / j!`.
#[derive(Debug, Clone, Default)]
pub struct PowerSums {
    /// `series[l - 1] = ψ_l`
    series: Vec<TrigPoly>,
    powers: HashMap<(usize, u32), TrigPoly>,
    sums: HashMap<(usize, usize), TrigPoly>,
    indices: MultiIndexCache,
}

impl PowerSums {
    pub fn new(series: Vec<TrigPoly>) -> Self {
        Self { series, ..Self::default() }
    }

    pub fn push(&mut self, next: TrigPoly) {
        self.series.push(next);
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    fn power(&mut self, l: usize, a: u32) -> TrigPoly {
        if let Some(p) = self.powers.get(&(l, a)) {
            return p.clone();
        }
        let p = if a == 1 { self.series[l - 1].clone() } else { self.power(l, a - 1).multiply(&self.series[l - 1]) };
        self.powers.insert((l, a), p.clone());
        p
    }

    /// `P_{j,w}`; needs the first `w - j + 1` series terms.
    pub fn get(&mut self, j: usize, w: usize) -> Result<TrigPoly> {
        if let Some(p) = self.sums.get(&(j, w)) {
            return Ok(p.clone());
        }
        if j == 0 {
            return Ok(if w == 0 { TrigPoly::constant(1.0) } else { TrigPoly::zero() });
        }
        if w >= j && w - j + 1 > self.series.len() {
            return Err(Error::MissingOrder { needed: w - j + 1, available: self.series.len() + 1 });
        }
        let mut acc = TrigPoly::zero();
        for alpha in self.indices.get(1, j, w).iter() {
            let mut term = TrigPoly::constant(1.0 / alpha.factorial());
            for (l, a) in alpha.entries() {
                term = term.multiply(&self.power(l, a));
            }
            acc += &term;
        }
        self.sums.insert((j, w), acc.clone());
        Ok(acc)
    }
}

/// Coefficients `S_0..S_n`, `C_0..C_n` of `sin θ` and `cos θ` for
/// `θ = ω/2 + sum_k ε^k θ_k`, where `thetas[k - 1] = θ_k`.
pub fn sin_cos_series(rot: &RotationNumber, thetas: &[TrigPoly]) -> (Vec<TrigPoly>, Vec<TrigPoly>) {
    let mut sin = vec![TrigPoly::constant(rot.s())];
    let mut cos = vec![TrigPoly::constant(rot.c())];
    for k in 1..=thetas.len() {
        let (st, ct) = sin_cos_tilde(thetas, &sin, &cos, k);
        sin.push(&st + &thetas[k - 1].scale(rot.c()));
        cos.push(&ct - &thetas[k - 1].scale(rot.s()));
    }
    (sin, cos)
}

/// The parts `S̃_k`, `C̃_k` of `S_k`, `C_k` that depend only on `θ_{<k}`.
fn sin_cos_tilde(thetas: &[TrigPoly], sin: &[TrigPoly], cos: &[TrigPoly], k: usize) -> (TrigPoly, TrigPoly) {
    let mut st = TrigPoly::zero();
    let mut ct = TrigPoly::zero();
    for l in 1..k {
        let weighted = thetas[l - 1].scale(l as f64 / k as f64);
        st += &weighted.multiply(&cos[k - l]);
        ct -= &weighted.multiply(&sin[k - l]);
    }
    (st, ct)
}

/// `H_k` for a composition `f∘ψ` where `f = f_0 + sum_i ε^i f_i` with `f_0`
/// constant: `H_k = f_k + sum_{i<k} sum_{j<=k-i} P_{j,k-i} f_i^{(j)}`.
///
/// `f_orders[i - 1] = f_i` (missing trailing orders count as zero) and
/// `psi_orders[l - 1] = ψ_l` for `l < k`.
pub fn compose_coeffs(f_orders: &[TrigPoly], psi_orders: &[TrigPoly], k: usize) -> Result<TrigPoly> {
    if k == 0 {
        return Err(Error::Precondition("composition orders start at 1".into()));
    }
    if psi_orders.len() + 1 < k {
        return Err(Error::MissingOrder { needed: k - 1, available: psi_orders.len() + 1 });
    }
    let mut sums = PowerSums::new(psi_orders[..k - 1].to_vec());
    compose_with(f_orders, &mut sums, k)
}

fn compose_with(f_orders: &[TrigPoly], sums: &mut PowerSums, k: usize) -> Result<TrigPoly> {
    let zero = TrigPoly::zero();
    let f = |i: usize| f_orders.get(i - 1).unwrap_or(&zero);
    let mut out = f(k).clone();
    for i in 1..k {
        let fi = f(i);
        if fi.is_zero() {
            continue;
        }
        let mut derivative = fi.clone();
        for j in 1..=(k - i) {
            derivative = derivative.derivative();
            let weight = sums.get(j, k - i)?;
            out += &weight.multiply(&derivative);
        }
    }
    Ok(out)
}

/// Everything the recursion has produced so far, orders `0..=order()`.
///
/// Index 0 of each list holds the unperturbed value: `h_0 = 1`, `θ_0 = ω/2`,
/// `S_0 = s`, `C_0 = c`, `H_0[h] = 1` and zero elsewhere.
#[derive(Debug, Clone)]
pub struct ExpansionState {
    rot: RotationNumber,
    tol: Tolerances,
    h: Vec<TrigPoly>,
    dh: Vec<TrigPoly>,
    theta: Vec<TrigPoly>,
    phi: Vec<TrigPoly>,
    psi: Vec<TrigPoly>,
    sin: Vec<TrigPoly>,
    cos: Vec<TrigPoly>,
    comp_h: Vec<TrigPoly>,
    comp_dh: Vec<TrigPoly>,
    q: Vec<TrigPoly>,
    q_tilde: Vec<TrigPoly>,
    r_tilde: Vec<TrigPoly>,
    zeta: Vec<TrigPoly>,
    sums: PowerSums,
}

/// Data computed for one order before the persistence decision.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderTerms {
    pub k: usize,
    /// `H_k[h]`, the coefficient of `h∘ψ`.
    pub comp_h: TrigPoly,
    /// `H_k[h']`, the coefficient of `h'∘ψ`.
    pub comp_dh: TrigPoly,
    pub q: TrigPoly,
    pub q_tilde: TrigPoly,
    pub r_tilde: TrigPoly,
    /// `C̃_k`.
    pub cos_tilde: TrigPoly,
}

impl ExpansionState {
    /// `h_orders[k - 1] = h_k`; orders past the end are zero.
    pub fn new(rot: RotationNumber, h_orders: Vec<TrigPoly>, tol: Tolerances) -> Self {
        let mut h = vec![TrigPoly::constant(1.0)];
        h.extend(h_orders);
        let dh = h.iter().map(TrigPoly::derivative).collect();
        Self {
            rot,
            tol,
            h,
            dh,
            theta: vec![TrigPoly::constant(rot.omega() / 2.0)],
            phi: vec![TrigPoly::zero()],
            psi: vec![TrigPoly::zero()],
            sin: vec![TrigPoly::constant(rot.s())],
            cos: vec![TrigPoly::constant(rot.c())],
            comp_h: vec![TrigPoly::constant(1.0)],
            comp_dh: vec![TrigPoly::zero()],
            q: vec![TrigPoly::zero()],
            q_tilde: vec![TrigPoly::zero()],
            r_tilde: vec![TrigPoly::constant(rot.c())],
            zeta: vec![TrigPoly::zero()],
            sums: PowerSums::default(),
        }
    }

    pub fn rot(&self) -> &RotationNumber {
        &self.rot
    }

    pub fn tol(&self) -> &Tolerances {
        &self.tol
    }

    /// Highest completed order.
    pub fn order(&self) -> usize {
        self.theta.len() - 1
    }

    /// Number of supplied support coefficients `h_1..h_K`.
    pub fn support_len(&self) -> usize {
        self.h.len() - 1
    }

    /// `h_1..h_K` as supplied (possibly corrected).
    pub fn h_orders(&self) -> &[TrigPoly] {
        &self.h[1..]
    }

    /// Replaces `h_k` for an order not yet computed.
    pub fn set_h(&mut self, k: usize, value: TrigPoly) -> Result<()> {
        if k == 0 || k <= self.order() {
            return Err(Error::Precondition(format!("h_{k} is frozen once order {k} is computed")));
        }
        while self.h.len() <= k {
            self.h.push(TrigPoly::zero());
            self.dh.push(TrigPoly::zero());
        }
        self.dh[k] = value.derivative();
        self.h[k] = value;
        Ok(())
    }

    pub fn h(&self, k: usize) -> TrigPoly {
        self.h.get(k).cloned().unwrap_or_default()
    }

    pub fn dh(&self, k: usize) -> TrigPoly {
        self.dh.get(k).cloned().unwrap_or_default()
    }

    fn stored(list: &[TrigPoly], k: usize) -> Result<&TrigPoly> {
        list.get(k).ok_or(Error::MissingOrder { needed: k, available: list.len() })
    }

    pub fn theta(&self, k: usize) -> Result<&TrigPoly> {
        Self::stored(&self.theta, k)
    }
    pub fn phi(&self, k: usize) -> Result<&TrigPoly> {
        Self::stored(&self.phi, k)
    }
    pub fn psi(&self, k: usize) -> Result<&TrigPoly> {
        Self::stored(&self.psi, k)
    }
    pub fn sin_coeff(&self, k: usize) -> Result<&TrigPoly> {
        Self::stored(&self.sin, k)
    }
    pub fn cos_coeff(&self, k: usize) -> Result<&TrigPoly> {
        Self::stored(&self.cos, k)
    }
    pub fn comp_h(&self, k: usize) -> Result<&TrigPoly> {
        Self::stored(&self.comp_h, k)
    }
    pub fn comp_dh(&self, k: usize) -> Result<&TrigPoly> {
        Self::stored(&self.comp_dh, k)
    }
    pub fn q(&self, k: usize) -> Result<&TrigPoly> {
        Self::stored(&self.q, k)
    }
    pub fn q_tilde(&self, k: usize) -> Result<&TrigPoly> {
        Self::stored(&self.q_tilde, k)
    }
    pub fn r_tilde(&self, k: usize) -> Result<&TrigPoly> {
        Self::stored(&self.r_tilde, k)
    }
    pub fn zeta(&self, k: usize) -> Result<&TrigPoly> {
        Self::stored(&self.zeta, k)
    }

    /// `θ_1..θ_m` for the completed orders.
    pub fn thetas(&self) -> &[TrigPoly] {
        &self.theta[1..]
    }
    pub fn phis(&self) -> &[TrigPoly] {
        &self.phi[1..]
    }
    pub fn psis(&self) -> &[TrigPoly] {
        &self.psi[1..]
    }

    /// Computes `H_k[h]`, `H_k[h']`, `Q_k`, `Q̃_k`, `R̃_k` for `k = order() + 1`.
    pub fn order_terms(&mut self, k: usize) -> Result<OrderTerms> {
        if k != self.order() + 1 {
            return Err(Error::MissingOrder { needed: k, available: self.order() + 1 });
        }
        let (s, c) = (self.rot.s(), self.rot.c());
        let comp_h = compose_with(&self.h[1..], &mut self.sums, k)?;
        let comp_dh = compose_with(&self.dh[1..], &mut self.sums, k)?;
        let dh_k = self.dh(k);

        // Q̃_k = s H̃_k[h'] + sum_{l<k} H_l[h'] S_{k-l}
        let mut q_tilde = (&comp_dh - &dh_k).scale(s);
        for l in 1..k {
            q_tilde += &self.comp_dh[l].multiply(&self.sin[k - l]);
        }
        let q = &dh_k.scale(s) + &q_tilde;

        // R̃_k = c H_k[h] + C̃_k + sum_{l<k} H_l[h] C_{k-l}
        let (_, cos_tilde) = sin_cos_tilde(&self.theta[1..], &self.sin, &self.cos, k);
        let mut r_tilde = &comp_h.scale(c) + &cos_tilde;
        for l in 1..k {
            r_tilde += &self.comp_h[l].multiply(&self.cos[k - l]);
        }
        Ok(OrderTerms { k, comp_h, comp_dh, q, q_tilde, r_tilde, cos_tilde })
    }

    /// Appends a solved order: `θ_k`, `φ_k`, `ψ_k` and `ζ_k` together with the
    /// terms they were solved from. Updates `S_k`, `C_k` and the power sums.
    pub(crate) fn push_order(
        &mut self,
        terms: OrderTerms,
        theta: TrigPoly,
        phi: TrigPoly,
        psi: TrigPoly,
        zeta: TrigPoly,
    ) -> Result<()> {
        let k = terms.k;
        if k != self.order() + 1 {
            return Err(Error::MissingOrder { needed: k, available: self.order() + 1 });
        }
        self.theta.push(theta);
        let (st, ct) = sin_cos_tilde(&self.theta[1..], &self.sin, &self.cos, k);
        self.sin.push(&st + &self.theta[k].scale(self.rot.c()));
        self.cos.push(&ct - &self.theta[k].scale(self.rot.s()));
        self.phi.push(phi);
        self.sums.push(psi.clone());
        self.psi.push(psi);
        self.comp_h.push(terms.comp_h);
        self.comp_dh.push(terms.comp_dh);
        self.q.push(terms.q);
        self.q_tilde.push(terms.q_tilde);
        self.r_tilde.push(terms.r_tilde);
        self.zeta.push(zeta);
        Ok(())
    }
}

/// `(S_k, C_k)` from a state that has completed order `k`.
pub fn sincos_coeffs(state: &ExpansionState, k: usize) -> Result<(TrigPoly, TrigPoly)> {
    if k > state.order() {
        return Err(Error::MissingOrder { needed: k, available: state.order() + 1 });
    }
    let (sin, cos) = sin_cos_series(state.rot(), &state.thetas()[..k]);
    Ok((sin[k].clone(), cos[k].clone()))
}

/// `(Q_k, R̃_k)` for the next order `k = state.order() + 1`.
pub fn qr_coeffs(state: &mut ExpansionState, k: usize) -> Result<(TrigPoly, TrigPoly)> {
    let terms = state.order_terms(k)?;
    Ok((terms.q, terms.r_tilde))
}
