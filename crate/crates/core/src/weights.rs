//! Diagonal Lyapunov weight families and their realization on a grid.

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Diagonal weight specification. The exponential family realizes
/// `P_j = diag{p+ exp(-mu x_j), p- exp(+mu x_j)}` at the cell and ghost
/// centres; the explicit variant stores every diagonal directly.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// `(cells + 2) x k` row-major diagonals, row `j + 1` for grid index `j`.
    Explicit { values: Vec<f64> },
    Exponential {
        p_plus: Vec<f64>,
        p_minus: Vec<f64>,
        mu: f64,
    },
}

impl WeightSpec {
    /// Exponential family with scalar constants for the `k = 2`, `m = 1` case.
    pub fn exponential_2x2(p1: f64, p2: f64, mu: f64) -> Self {
        WeightSpec::Exponential {
            p_plus: vec![p1],
            p_minus: vec![p2],
            mu,
        }
    }

    pub fn mu(&self) -> Option<f64> {
        match self {
            WeightSpec::Exponential { mu, .. } => Some(*mu),
            WeightSpec::Explicit { .. } => None,
        }
    }
}

/// Per-index diagonal weights covering the ghost indices `-1..=cells`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedWeights {
    components: usize,
    cells: usize,
    /// `(cells + 2) x k` row-major, row `j + 1` for grid index `j`.
    values: Vec<f64>,
}

impl RealizedWeights {
    #[inline]
    pub fn components(&self) -> usize {
        self.components
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Diagonal entry of component `i` at grid index `j` in `-1..=cells`.
    #[inline]
    pub fn entry(&self, j: i64, i: usize) -> f64 {
        self.values[(j + 1) as usize * self.components + i]
    }

    /// Diagonal of interior cell `j`.
    #[inline]
    pub fn cell(&self, j: usize) -> &[f64] {
        let k = self.components;
        &self.values[(j + 1) * k..(j + 2) * k]
    }
}

pub fn realize_weights(
    spec: &WeightSpec,
    grid: &GridSpec,
    components: usize,
    positive: usize,
) -> Result<RealizedWeights> {
    let cells = grid.cells;
    let values = match spec {
        WeightSpec::Explicit { values } => {
            if values.len() != (cells + 2) * components {
                return Err(Error::InvalidWeight(format!(
                    "explicit weights have {} entries, expected {}",
                    values.len(),
                    (cells + 2) * components
                )));
            }
            values.clone()
        }
        WeightSpec::Exponential {
            p_plus,
            p_minus,
            mu,
        } => {
            if p_plus.len() != positive || p_minus.len() != components - positive {
                return Err(Error::InvalidWeight(format!(
                    "exponential weight constants sized {}/{} do not match m = {positive}, k - m = {}",
                    p_plus.len(),
                    p_minus.len(),
                    components - positive
                )));
            }
            if !(*mu > 0.0) {
                return Err(Error::InvalidWeight(format!(
                    "rate mu must be positive, got {mu}"
                )));
            }
            let mut values = Vec::with_capacity((cells + 2) * components);
            for j in -1..=cells as i64 {
                let x = grid.center(j);
                for &p in p_plus {
                    values.push(p * (-mu * x).exp());
                }
                for &p in p_minus {
                    values.push(p * (mu * x).exp());
                }
            }
            values
        }
    };
    if values.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
        return Err(Error::InvalidWeight(
            "every realized diagonal entry must be strictly positive and finite".into(),
        ));
    }
    Ok(RealizedWeights {
        components,
        cells,
        values,
    })
}
