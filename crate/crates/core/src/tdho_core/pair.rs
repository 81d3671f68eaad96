use serde::{Deserialize, Serialize};

use crate::grid::Grid;
use crate::jet_math::{schwarzian_of_jet, Jet3, PhaseExpr};

use super::TdhoError;

/// One sample of an exact oscillator solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorState {
    pub t: f64,
    pub x: f64,
    pub xdot: f64,
    pub rho: f64,
    pub theta: f64,
    pub omega_inst: f64,
    pub omega_sq: f64,
    pub e_tk: f64,
}

/// Polar quantities of the exact solution at one point, derived from the
/// phase jet. Every field is exact to round-off through the orders listed.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PolarJets {
    /// θ through third order.
    pub theta: Jet3,
    /// ρ = sqrt(L̃/θ̇) through second order.
    pub rho: Jet3,
    /// ρ·cos θ through second order.
    pub x: Jet3,
    /// ρ·sin θ through second order.
    pub y: Jet3,
    /// Ω² = θ̇² + ½{θ; t}.
    pub omega_sq: f64,
}

/// Builds the polar jets from a phase jet. Fails when θ̇ ≤ 0.
pub(crate) fn polar_jets(theta: Jet3, l_tilde: f64, t: f64) -> Result<PolarJets, TdhoError> {
    if !(theta.v1 > 0.0) {
        return Err(TdhoError::PhaseNotMonotone {
            t,
            theta_dot: theta.v1,
        });
    }
    let rate = theta.derivative();
    let rho = rate.powf(-0.5) * l_tilde.sqrt();
    let x = rho * theta.cos();
    let y = rho * theta.sin();
    let omega_sq = theta.v1 * theta.v1 + 0.5 * schwarzian_of_jet(&theta);
    Ok(PolarJets {
        theta,
        rho,
        x,
        y,
        omega_sq,
    })
}

/// Ω²(t) = θ̇² + ½{θ; t}.
pub fn omega_sq_from_phase(phase: &PhaseExpr, t: f64) -> Result<f64, TdhoError> {
    let j = phase.eval_jet(t)?;
    if !(j.v1 > 0.0) {
        return Err(TdhoError::PhaseNotMonotone { t, theta_dot: j.v1 });
    }
    Ok(j.v1 * j.v1 + 0.5 * schwarzian_of_jet(&j))
}

/// Teager-Kaiser energy (M/2)(ẋ² − x·ẍ).
pub fn tk_energy(x: f64, xdot: f64, xddot: f64, mass: f64) -> f64 {
    0.5 * mass * (xdot * xdot - x * xddot)
}

/// ρ̈ + Ω²ρ − L̃²/ρ³ for ρ = sqrt(L̃/θ̇).
pub fn ermakov_pinney_residual(phase: &PhaseExpr, l_tilde: f64, t: f64) -> Result<f64, TdhoError> {
    check_positive("l_tilde", l_tilde)?;
    let p = polar_jets(phase.eval_jet(t)?, l_tilde, t)?;
    let r = p.rho.v0;
    Ok(p.rho.v2 + p.omega_sq * r - l_tilde * l_tilde / (r * r * r))
}

/// Effective radial Hamiltonian P_ρ²/(2M) + ½MΩ²ρ² + M·L̃²/(2ρ²), P_ρ = Mρ̇.
/// Requires `rho > 0`.
pub fn radial_energy(rho: f64, rhodot: f64, omega_sq: f64, l_tilde: f64, mass: f64) -> f64 {
    let p = mass * rhodot;
    p * p / (2.0 * mass)
        + 0.5 * mass * omega_sq * rho * rho
        + mass * l_tilde * l_tilde / (2.0 * rho * rho)
}

/// θ(t) = θ₀ + L̃·∫ dτ/ρ²(τ) on a uniform grid, by cumulative composite
/// Simpson quadrature. Odd-indexed points close with a three-point
/// half-panel rule so that the even chain carries no extra error.
pub fn phase_from_amplitude(
    rho: &[f64],
    dt: f64,
    l_tilde: f64,
    theta0: f64,
) -> Result<Vec<f64>, TdhoError> {
    check_positive("dt", dt)?;
    if let Some((index, &value)) = rho
        .iter()
        .enumerate()
        .find(|(_, r)| !(**r > 0.0) || !r.is_finite())
    {
        return Err(TdhoError::NonpositiveAmplitude { index, value });
    }
    let n = rho.len();
    let f: Vec<f64> = rho.iter().map(|r| 1.0 / (r * r)).collect();
    let mut integral = vec![0.0; n];
    if n == 2 {
        integral[1] = 0.5 * dt * (f[0] + f[1]);
    } else if n > 2 {
        for i in (2..n).step_by(2) {
            integral[i] = integral[i - 2] + dt / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
        }
        for i in (1..n).step_by(2) {
            integral[i] = if i + 1 < n {
                integral[i - 1] + dt / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1])
            } else {
                integral[i - 1] + dt / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i])
            };
        }
    }
    Ok(integral.iter().map(|v| theta0 + l_tilde * v).collect())
}

fn check_positive(name: &'static str, v: f64) -> Result<(), TdhoError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(TdhoError::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// A sampled pair (Ω², exact solution) built from a phase function.
#[derive(Debug, Clone)]
pub struct GeneratedPair {
    pub phase: PhaseExpr,
    pub l_tilde: f64,
    pub mass: f64,
    pub grid: Grid,
    pub samples: Vec<OscillatorState>,
}

/// Worst-case invariant deviations over a pair's samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    /// max |M ρ² θ̇ − M L̃| / (M L̃)
    pub l_drift: f64,
    /// max |ẍ + Ω² x| / max |Ω² x|
    pub construction_residual: f64,
    /// max |(M/2)(ẋ² − xẍ) − (M/2)(ẋ² + Ω²x²)| / max |E_TK|
    pub tk_consistency: f64,
    /// max of |ρ̈ + Ω²ρ − L̃²/ρ³| / (|ρ̈| + |Ω²ρ| + L̃²/ρ³)
    pub ermakov_pinney: f64,
    /// max |W(ρcosθ, ρsinθ) − L̃| / L̃
    pub wronskian_drift: f64,
}

/// Builds the exact solution x = sqrt(L̃/θ̇)·cos θ on the grid.
pub fn generate_pair(
    phase: &PhaseExpr,
    l_tilde: f64,
    mass: f64,
    grid: Grid,
) -> Result<GeneratedPair, TdhoError> {
    check_positive("l_tilde", l_tilde)?;
    check_positive("mass", mass)?;
    grid.validate()?;
    let samples = grid
        .points()
        .map(|t| {
            let p = polar_jets(phase.eval_jet(t)?, l_tilde, t)?;
            Ok(OscillatorState {
                t,
                x: p.x.v0,
                xdot: p.x.v1,
                rho: p.rho.v0,
                theta: p.theta.v0,
                omega_inst: p.theta.v1,
                omega_sq: p.omega_sq,
                e_tk: tk_energy(p.x.v0, p.x.v1, p.x.v2, mass),
            })
        })
        .collect::<Result<Vec<_>, TdhoError>>()?;
    Ok(GeneratedPair {
        phase: phase.clone(),
        l_tilde,
        mass,
        grid,
        samples,
    })
}

impl GeneratedPair {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.x).collect()
    }

    /// Momentum p = M·ẋ at every sample.
    pub fn momenta(&self) -> Vec<f64> {
        self.samples.iter().map(|s| self.mass * s.xdot).collect()
    }

    /// The exact invariant L = M ρ² θ̇ at every sample.
    pub fn angular_momentum(&self) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| self.mass * s.rho * s.rho * s.omega_inst)
            .collect()
    }

    /// Re-derives all the construction identities from the phase jets.
    pub fn check_invariants(&self) -> Result<InvariantReport, TdhoError> {
        let lt = self.l_tilde;
        let m = self.mass;
        let mut l_drift = 0.0_f64;
        let mut res_max = 0.0_f64;
        let mut res_scale = 0.0_f64;
        let mut tk_diff = 0.0_f64;
        let mut tk_scale = 0.0_f64;
        let mut ep = 0.0_f64;
        let mut w_drift = 0.0_f64;
        for s in &self.samples {
            let p = polar_jets(self.phase.eval_jet(s.t)?, lt, s.t)?;
            let x = p.x;
            let rho = p.rho.v0;
            l_drift = l_drift.max((rho * rho * p.theta.v1 - lt).abs() / lt);

            let restoring = p.omega_sq * x.v0;
            res_max = res_max.max((x.v2 + restoring).abs());
            res_scale = res_scale.max(restoring.abs());

            let tk_jet = tk_energy(x.v0, x.v1, x.v2, m);
            let tk_ode = 0.5 * m * (x.v1 * x.v1 + p.omega_sq * x.v0 * x.v0);
            tk_diff = tk_diff.max((tk_jet - tk_ode).abs());
            tk_scale = tk_scale.max(tk_jet.abs());

            let centrifugal = lt * lt / (rho * rho * rho);
            let resid = p.rho.v2 + p.omega_sq * rho - centrifugal;
            let scale = p.rho.v2.abs() + (p.omega_sq * rho).abs() + centrifugal;
            ep = ep.max(resid.abs() / scale);

            let w = p.x.v0 * p.y.v1 - p.x.v1 * p.y.v0;
            w_drift = w_drift.max((w - lt).abs() / lt);
        }
        Ok(InvariantReport {
            l_drift,
            construction_residual: if res_scale > 0.0 {
                res_max / res_scale
            } else {
                res_max
            },
            tk_consistency: if tk_scale > 0.0 {
                tk_diff / tk_scale
            } else {
                tk_diff
            },
            ermakov_pinney: ep,
            wronskian_drift: w_drift,
        })
    }
}
