use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BivariatePoly, DeformationSource, DeformationSpec};
use crate::error::{Error, Result};
use crate::fourier::{Tolerances, TrigPoly};

/// `[l, re, im]`: coefficient `re + i im` of `e^{i l t}`.
pub type HarmonicTriple = (i64, f64, f64);

/// On-disk form of a deformation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DeformationDoc {
    Fourier(FourierDoc),
    Cartesian(CartesianDoc),
    /// Accepted by the parser only to be rejected with a clear message.
    Polar(serde_json::Value),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierDoc {
    /// One list of harmonics per order, starting at order 1.
    pub h: Vec<Vec<HarmonicTriple>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CartesianDoc {
    /// `[i, j, p_ij]` monomials of `P_1`.
    #[serde(default)]
    pub terms: Vec<(u32, u32, f64)>,
    /// Per-order `P_k` lists; only a single order is supported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<Vec<(u32, u32, f64)>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
}

impl DeformationDoc {
    pub fn into_spec(self) -> Result<DeformationSpec> {
        match self {
            Self::Polar(_) => Err(Error::Unsupported("polar deformations r(phi; eps) are not supported".into())),
            Self::Fourier(doc) => {
                let tol = Tolerances::default();
                let mut h = Vec::with_capacity(doc.h.len());
                for (k, order) in doc.h.into_iter().enumerate() {
                    let poly = TrigPoly::from_coeffs(order.into_iter().map(|(l, re, im)| (l, Complex64::new(re, im))), true);
                    let poly = poly.normalize(&tol).map_err(|e| Error::Deformation(format!("h_{}: {e}", k + 1)))?;
                    h.push(poly);
                }
                let spec = DeformationSpec::fourier(h);
                match doc.degree {
                    Some(n) => spec.with_declared_degree(n),
                    None => Ok(spec),
                }
            }
            Self::Cartesian(doc) => {
                let terms = match (doc.orders, doc.terms.is_empty()) {
                    (Some(_), false) => {
                        return Err(Error::Deformation("give either `terms` or `orders`, not both".into()))
                    }
                    (Some(orders), true) if orders.len() == 1 => orders.into_iter().next().unwrap_or_default(),
                    (Some(orders), true) => {
                        return Err(Error::Unsupported(format!(
                            "only P = 1 + eps P_1 is supported; got {} perturbation orders",
                            orders.len()
                        )))
                    }
                    (None, _) => doc.terms,
                };
                let p1 = BivariatePoly::from_terms(terms);
                if p1.is_zero() {
                    return Err(Error::Deformation("cartesian P_1 has no nonzero terms".into()));
                }
                let spec = DeformationSpec::cartesian(p1);
                match doc.degree {
                    Some(n) => spec.with_declared_degree(n),
                    None => Ok(spec),
                }
            }
        }
    }

    /// Fourier document carrying the given orders (trailing zero orders kept).
    pub fn from_orders(h_orders: &[TrigPoly], degree: Option<usize>) -> Self {
        Self::Fourier(FourierDoc {
            h: h_orders.iter().map(|hk| hk.iter().map(|(l, c)| (l, c.re, c.im)).collect()).collect(),
            degree,
        })
    }

    pub fn from_spec(spec: &DeformationSpec, max_order: usize) -> Self {
        match spec.source() {
            DeformationSource::Cartesian(p1) => Self::Cartesian(CartesianDoc {
                terms: p1.terms().collect(),
                orders: None,
                degree: spec.declared_degree(),
            }),
            DeformationSource::Fourier(_) => Self::from_orders(&spec.h_orders(max_order), spec.declared_degree()),
        }
    }
}
