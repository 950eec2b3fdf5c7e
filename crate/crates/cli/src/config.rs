use std::path::Path;

use caustica::deformations::DeformationDoc;
use caustica::oracle::{geometric_sweep, DEFAULT_RESIDUAL_GRID};
use caustica::persistence::{DEFAULT_MAX_ORDER, MAX_ORDER_CAP};
use caustica::{RotationNumber, Tolerances};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub deformation: DeformationDoc,
    pub rotation: RotationSpec,
    #[serde(default = "default_max_order")]
    pub max_order: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub oracle: OracleConfig,
    /// Keep only rotations with `p = 1`.
    #[serde(default)]
    pub p1_only: bool,
}

fn default_max_order() -> usize {
    DEFAULT_MAX_ORDER
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum RotationSpec {
    Single { p: i64, q: i64 },
    Range { q_range: [i64; 2] },
    List { list: Vec<[i64; 2]> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// `[largest ε, smallest ε, number of points]`.
    pub eps_sweep: (f64, f64, usize),
    pub grid: usize,
    /// Support orders kept in the numerical table beyond `max_order`.
    pub extra_orders: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { eps_sweep: (1e-2, 1e-5, 7), grid: DEFAULT_RESIDUAL_GRID, extra_orders: 2 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn rotations(&self) -> Result<Vec<RotationNumber>, CliError> {
        let mut out = match &self.rotation {
            RotationSpec::Single { p, q } => vec![RotationNumber::new(*p, *q)?],
            RotationSpec::Range { q_range: [a, b] } => {
                if a > b || *a < 3 {
                    return Err(CliError::Config(format!("q_range [{a}, {b}] must satisfy 3 <= a <= b")));
                }
                RotationNumber::enumerate(*a, *b, false)
            }
            RotationSpec::List { list } => {
                list.iter().map(|[p, q]| RotationNumber::new(*p, *q)).collect::<Result<_, _>>()?
            }
        };
        if self.p1_only {
            out.retain(|r| r.p() == 1);
        }
        out.sort_by_key(|r| (r.q(), r.p()));
        out.dedup_by_key(|r| (r.q(), r.p()));
        if out.is_empty() {
            return Err(CliError::Config("the rotation list is empty".into()));
        }
        Ok(out)
    }

    pub fn check_max_order(&self) -> Result<(), CliError> {
        if self.max_order == 0 || self.max_order > MAX_ORDER_CAP {
            return Err(CliError::Config(format!(
                "max_order must lie in 1..={MAX_ORDER_CAP}, got {}",
                self.max_order
            )));
        }
        Ok(())
    }

    pub fn eps_values(&self) -> Result<Vec<f64>, CliError> {
        let (lo, hi, n) = self.oracle.eps_sweep;
        if n < 3 {
            return Err(CliError::Config(format!("the epsilon sweep needs at least 3 points, got {n}")));
        }
        if !(lo > 0.0 && hi > 0.0) || lo.max(hi) / lo.min(hi) < 99.999 {
            return Err(CliError::Config(format!("the epsilon sweep {lo}..{hi} must span two decades")));
        }
        geometric_sweep(lo, hi, n).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Parses `lo,hi,n`.
pub fn parse_sweep(text: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("expected lo,hi,n but got `{text}`"));
    };
    let lo = lo.parse::<f64>().map_err(|e| format!("lo: {e}"))?;
    let hi = hi.parse::<f64>().map_err(|e| format!("hi: {e}"))?;
    let n = n.parse::<usize>().map_err(|e| format!("n: {e}"))?;
    Ok((lo, hi, n))
}
