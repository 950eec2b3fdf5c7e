use std::collections::BTreeMap;

use crate::expansions::MultiIndexCache;
use crate::fourier::TrigPoly;

/// A real polynomial `sum p_ij x^i y^j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BivariatePoly {
    coeffs: BTreeMap<(u32, u32), f64>,
}

impl BivariatePoly {
    /// Builds from `(i, j, p_ij)` triples; repeated monomials are summed and
    /// zero coefficients dropped.
    pub fn from_terms<I: IntoIterator<Item = (u32, u32, f64)>>(terms: I) -> Self {
        let mut coeffs = BTreeMap::new();
        for (i, j, p) in terms {
            *coeffs.entry((i, j)).or_insert(0.0) += p;
        }
        coeffs.retain(|_, p| *p != 0.0);
        Self { coeffs }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.coeffs.iter().map(|(&(i, j), &p)| (i, j, p))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|&(i, j)| (i + j) as usize).max().unwrap_or(0)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms().map(|(i, j, p)| p * x.powi(i as i32) * y.powi(j as i32)).sum()
    }

    /// Every monomial has even total degree.
    pub fn is_even(&self) -> bool {
        self.coeffs.keys().all(|&(i, j)| (i + j) % 2 == 0)
    }

    /// Every monomial has odd total degree.
    pub fn is_odd(&self) -> bool {
        self.coeffs.keys().all(|&(i, j)| (i + j) % 2 == 1)
    }
}

/// `h_1..h_K` for the curve `x² + y² = 1 + ε P_1(x, y)`, from
/// `2h_k + G̃*_k + G̃•_k = G⋄_{k-1}` where `G⋄_w` is the `ε^w` coefficient of
/// `P_1(x, y)` along `x = cos ψ h - sin ψ h'`, `y = sin ψ h + cos ψ h'`.
pub fn support_from_cartesian(p1: &BivariatePoly, max_order: usize) -> Vec<TrigPoly> {
    let cos = TrigPoly::cos(1, 1.0);
    let sin = TrigPoly::sin(1, 1.0);
    let max_i = p1.terms().map(|(i, _, _)| i).max().unwrap_or(0);
    let max_j = p1.terms().map(|(_, j, _)| j).max().unwrap_or(0);
    let mut indices = MultiIndexCache::default();

    // index 0 holds the unperturbed circle
    let mut h = vec![TrigPoly::constant(1.0)];
    let mut dh = vec![TrigPoly::zero()];
    let mut xs = vec![cos.clone()];
    let mut ys = vec![sin.clone()];
    let mut x_powers = PowerTable::new(max_i);
    let mut y_powers = PowerTable::new(max_j);

    for k in 1..=max_order {
        let w = k - 1;
        let mut diamond = TrigPoly::zero();
        for (i, j, p) in p1.terms() {
            let mut term = TrigPoly::zero();
            for a in 0..=w {
                let xa = x_powers.coeff(&mut indices, &xs, i, a);
                if xa.is_zero() {
                    continue;
                }
                let yb = y_powers.coeff(&mut indices, &ys, j, w - a);
                term += &xa.multiply(&yb);
            }
            diamond += &term.scale(p);
        }
        let mut rhs = diamond;
        for i in 1..k {
            rhs -= &h[i].multiply(&h[k - i]);
            rhs -= &dh[i].multiply(&dh[k - i]);
        }
        let hk = rhs.scale(0.5);
        let dhk = hk.derivative();
        xs.push(&cos.multiply(&hk) - &sin.multiply(&dhk));
        ys.push(&sin.multiply(&hk) + &cos.multiply(&dhk));
        h.push(hk);
        dh.push(dhk);
    }
    h.remove(0);
    h
}

/// Memoized `ε^w` coefficients of `(sum_l ε^l v_l)^i`, expanded as
/// `sum_{|α| = i, ||α|| = w} i!/α! prod v_l^{α_l}` over indices from 0.
struct PowerTable {
    max_power: u32,
    coeffs: BTreeMap<(u32, usize), TrigPoly>,
    monomials: BTreeMap<(usize, u32), TrigPoly>,
}

impl PowerTable {
    fn new(max_power: u32) -> Self {
        Self { max_power, coeffs: BTreeMap::new(), monomials: BTreeMap::new() }
    }

    fn monomial(&mut self, series: &[TrigPoly], l: usize, a: u32) -> TrigPoly {
        if a == 0 {
            return TrigPoly::constant(1.0);
        }
        if let Some(m) = self.monomials.get(&(l, a)) {
            return m.clone();
        }
        let m = self.monomial(series, l, a - 1).multiply(&series[l]);
        self.monomials.insert((l, a), m.clone());
        m
    }

    fn coeff(&mut self, indices: &mut MultiIndexCache, series: &[TrigPoly], i: u32, w: usize) -> TrigPoly {
        debug_assert!(i <= self.max_power);
        if let Some(c) = self.coeffs.get(&(i, w)) {
            return c.clone();
        }
        let i_fact: f64 = (1..=i).map(f64::from).product();
        let mut acc = if i == 0 && w == 0 { TrigPoly::constant(1.0) } else { TrigPoly::zero() };
        if i > 0 {
            for alpha in indices.get(0, i as usize, w).iter() {
                let mut term = TrigPoly::constant(i_fact / alpha.factorial());
                for (l, a) in alpha.entries() {
                    term = term.multiply(&self.monomial(series, l, a));
                }
                acc += &term;
            }
        }
        self.coeffs.insert((i, w), acc.clone());
        acc
    }
}
