//! Time spent by a complex solution inside narrow phase windows.
//!
//! With ψ = ρ·e^{iθ} and Im(ψ̄·ψ') = W constant, θ' = W/ρ², so the time to
//! sweep a window δθ is ≈ δθ·ρ²/W and ratios of dwell times are ratios of
//! ρ² at the two windows.

use super::{IntegrationResult, OracleError};

pub const DEFAULT_DWELL_WINDOW: f64 = 1e-3;

/// Continuous phase of the complex solution, starting from the principal
/// argument of the first sample. Fails if θ' = Im(ψ̄·ψ')/|ψ|² is not
/// positive at some sample.
pub fn unwrapped_phase(result: &IntegrationResult) -> Result<Vec<f64>, OracleError> {
    if result.is_empty() {
        return Err(OracleError::InvalidInput("empty integration result".into()));
    }
    let mut phase = Vec::with_capacity(result.len());
    phase.push(result.y[0].arg());
    for i in 1..result.len() {
        let step = (result.y[i] * result.y[i - 1].conj()).arg();
        phase.push(phase[i - 1] + step);
    }
    for i in 0..result.len() {
        if !(phase_rate(result, i) > 0.0) {
            return Err(OracleError::PhaseNotMonotone { t: result.grid[i] });
        }
    }
    Ok(phase)
}

fn phase_rate(result: &IntegrationResult, i: usize) -> f64 {
    let y = result.y[i];
    (y.conj() * result.ydot[i]).im / y.norm_sqr()
}

/// Phase as a function of time: cubic Hermite interpolation of the sampled
/// phase and its exact rate, inverted by bisection.
struct PhaseCurve<'a> {
    result: &'a IntegrationResult,
    phase: Vec<f64>,
}

impl PhaseCurve<'_> {
    fn at(&self, i: usize, t: f64) -> f64 {
        let (t0, t1) = (self.result.grid[i], self.result.grid[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (p0, p1) = (self.phase[i], self.phase[i + 1]);
        let (m0, m1) = (
            phase_rate(self.result, i) * h,
            phase_rate(self.result, i + 1) * h,
        );
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1
    }

    fn time_of(&self, theta: f64) -> Result<f64, OracleError> {
        let n = self.phase.len();
        if n < 2 || theta < self.phase[0] || theta > self.phase[n - 1] {
            return Err(OracleError::PhaseWindowNotFound { theta });
        }
        // First sample with phase ≥ θ; the bracket is [i−1, i].
        let i = self.phase.partition_point(|p| *p < theta).max(1);
        let (mut lo, mut hi) = (self.result.grid[i - 1], self.result.grid[i]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.at(i - 1, mid) < theta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn dwell(&self, theta: f64, dtheta: f64) -> Result<f64, OracleError> {
        let ta = self.time_of(theta)?;
        let tb = self
            .time_of(theta + dtheta)
            .map_err(|_| OracleError::PhaseWindowNotFound { theta })?;
        Ok(tb - ta)
    }
}

/// τ₁/τ₂ for the windows [θ₁, θ₁+δθ] and [θ₂, θ₂+δθ]. Phases are measured
/// on the branch returned by [`unwrapped_phase`].
pub fn dwell_time_ratio(
    result: &IntegrationResult,
    theta1: f64,
    theta2: f64,
    dtheta: f64,
) -> Result<f64, OracleError> {
    if !(dtheta > 0.0 && dtheta.is_finite()) {
        return Err(OracleError::InvalidInput(format!(
            "phase window must be positive, got {dtheta}"
        )));
    }
    let curve = PhaseCurve {
        result,
        phase: unwrapped_phase(result)?,
    };
    let tau1 = curve.dwell(theta1, dtheta)?;
    let tau2 = curve.dwell(theta2, dtheta)?;
    Ok(tau1 / tau2)
}
