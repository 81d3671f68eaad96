//! Replay of a constructed pair through the integrator.

use serde::{Deserialize, Serialize};

use super::{integrate_tdhoe, OracleError, Span, Tolerance};
use crate::tdho_core::{omega_sq_from_phase, GeneratedPair};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    /// max |x_replay − x_exact| / max |x_exact|
    pub max_deviation: f64,
    pub max_abs_deviation: f64,
    pub wronskian_drift: f64,
    pub steps_taken: usize,
}

impl ReplayReport {
    pub fn within(&self, deviation: f64, drift: f64) -> bool {
        self.max_deviation < deviation && self.wronskian_drift < drift
    }
}

/// A coefficient known only at samples, evaluated by cubic Lagrange
/// interpolation through the four nearest nodes (error O(h⁴)).
#[derive(Debug, Clone)]
pub struct SampledCoefficient {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl SampledCoefficient {
    /// `grid` must be strictly increasing with at least four nodes.
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self, OracleError> {
        if grid.len() != values.len() || grid.len() < 4 {
            return Err(OracleError::InvalidInput(format!(
                "need at least four matching samples, got {} nodes and {} values",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = (1..grid.len()).find(|&i| !(grid[i] > grid[i - 1])) {
            return Err(OracleError::InvalidInput(format!(
                "sample grid is not increasing at index {i} ({} after {})",
                grid[i],
                grid[i - 1]
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn at(&self, t: f64) -> f64 {
        let n = self.grid.len();
        let k = self.grid.partition_point(|g| *g < t);
        let start = k.saturating_sub(2).min(n - 4);
        let xs = &self.grid[start..start + 4];
        let ys = &self.values[start..start + 4];
        let mut acc = 0.0;
        for i in 0..4 {
            let mut w = 1.0;
            for j in 0..4 {
                if i != j {
                    w *= (t - xs[j]) / (xs[i] - xs[j]);
                }
            }
            acc += w * ys[i];
        }
        acc
    }
}

/// Integrates the pair's Ω² from its first sample's (x, ẋ) and compares the
/// result with every stored sample.
pub fn replay_pair(pair: &GeneratedPair, tol: Tolerance) -> Result<ReplayReport, OracleError> {
    let (first, last) = match (pair.samples.first(), pair.samples.last()) {
        (Some(a), Some(b)) if pair.samples.len() >= 2 => (a, b),
        _ => {
            return Err(OracleError::InvalidInput(
                "pair needs at least two samples".into(),
            ))
        }
    };
    let times = pair.times();
    // A phase that fails to evaluate surfaces as a non-finite right-hand side.
    let omega_sq = |t: f64| omega_sq_from_phase(&pair.phase, t).unwrap_or(f64::NAN);
    let run = integrate_tdhoe(
        omega_sq,
        first.x,
        first.xdot,
        Span::new(first.t, last.t),
        tol,
        &times,
    )?;
    let mut scale = 0.0_f64;
    let mut worst = 0.0_f64;
    for (s, y) in pair.samples.iter().zip(&run.y) {
        scale = scale.max(s.x.abs());
        worst = worst.max((y.re - s.x).abs());
    }
    Ok(ReplayReport {
        max_deviation: if scale > 0.0 { worst / scale } else { worst },
        max_abs_deviation: worst,
        wronskian_drift: run.wronskian_drift,
        steps_taken: run.steps_taken,
    })
}
