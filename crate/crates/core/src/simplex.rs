//! The `(b, c)` simplex of two-qubit `O(2) ⊗ O(2)`-invariant states
//! `a P̃₀ + b P̃₁ + c P̃₂`, `a = 1 − b − c`.
//!
//! Separable iff `b, c ≤ 1/2`; zero discord iff `b = c`.

use serde::Serialize;

use crate::discord::{discord, OptimizerConfig};
use crate::error::Result;
use crate::states::orthogonal_invariant_state;
use crate::Side;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimplexRow {
    pub b: f64,
    pub c: f64,
    pub separable: bool,
    pub zero_discord: bool,
    pub numeric_discord: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SimplexConfig {
    /// Grid spacing is `1/steps` along both axes.
    pub steps: usize,
    /// Compute the numeric discord at every `every`-th point; `None` skips it.
    pub every: Option<usize>,
    /// Tolerance on `|b − c|` for the zero-discord flag.
    pub tol: f64,
    pub optimizer: OptimizerConfig,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        Self { steps: 100, every: Some(10), tol: 1e-9, optimizer: OptimizerConfig::default() }
    }
}

pub fn is_separable(b: f64, c: f64) -> bool {
    b <= 0.5 && c <= 0.5
}

/// Rows for `b = i/steps`, `c = j/steps` with `i + j ≤ steps`, `i` outer.
pub fn simplex_grid(cfg: &SimplexConfig) -> Result<Vec<SimplexRow>> {
    let n = cfg.steps.max(1);
    let mut rows = Vec::new();
    let mut index = 0usize;
    for i in 0..=n {
        for j in 0..=n - i {
            let (b, c) = (i as f64 / n as f64, j as f64 / n as f64);
            let numeric_discord = match cfg.every {
                Some(every) if every > 0 && index.is_multiple_of(every) => {
                    let a = (1.0 - b - c).max(0.0);
                    let rho = orthogonal_invariant_state([a, b, c], 2)?;
                    Some(discord(&rho, 2, Side::A, &cfg.optimizer)?.discord)
                }
                _ => None,
            };
            rows.push(SimplexRow { b, c, separable: is_separable(b, c), zero_discord: (b - c).abs() <= cfg.tol, numeric_discord });
            index += 1;
        }
    }
    Ok(rows)
}
