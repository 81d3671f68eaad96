//! Barrier synthesis with prescribed reflection and transmission phase.
//!
//! A phase function θ(x̄) is assembled from the design so that ψ̄ ∝ e^{iθ}/√θ′
//! behaves as e^{ix̄} + σ₀e^{−ix̄} on the left and as e^{i(x̄+Δθ)} on the
//! right. The barrier follows from the phase alone, ū = 1 − θ′² − ½{θ; x̄},
//! so ψ̄ is an exact solution of ψ̄″ + (1 − ū)ψ̄ = 0.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Grid, GridError};
use crate::jet_math::{EvalError, Node, ParseError, PhaseExpr};
use crate::ode_oracle::{
    extract_reflection_with, ExtractOptions, OracleError, ScatteringReport, Span, Tolerance,
};
use crate::tdho_core::{polar_jets, NondimScales, TdhoError};

/// Default evaluation domain and step for presets.
pub const DEFAULT_DOMAIN: (f64, f64) = (-20.0, 20.0);
pub const DEFAULT_DX: f64 = 1e-3;
/// Step of the monotonicity and |σ| < 1 scan done at construction.
pub const VALIDATION_DX: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TunnelError {
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("|σ| = |{sigma}| ≥ 1 at x = {x}")]
    SigmaOutOfRange { x: f64, sigma: f64 },
    #[error("phase is not increasing at x = {x}: dθ/dx = {theta_prime:e}")]
    MonotonicityViolated { x: f64, theta_prime: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("eta expression: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl From<TdhoError> for TunnelError {
    fn from(e: TdhoError) -> Self {
        match e {
            TdhoError::PhaseNotMonotone { t, theta_dot } => TunnelError::MonotonicityViolated {
                x: t,
                theta_prime: theta_dot,
            },
            TdhoError::Eval(e) => TunnelError::Eval(e),
            TdhoError::Grid(e) => TunnelError::Grid(e),
            other => TunnelError::InvalidDesign(other.to_string()),
        }
    }
}

/// Design file schema: `{R, delta_theta, d, D, eta_expr, amp, theta0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    #[serde(rename = "R", default)]
    pub r: f64,
    #[serde(default)]
    pub delta_theta: f64,
    #[serde(default = "one")]
    pub d: f64,
    #[serde(rename = "D", default = "one")]
    pub big_d: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_expr: Option<String>,
    #[serde(default = "one")]
    pub amp: f64,
    #[serde(default)]
    pub theta0: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for DesignSpec {
    fn default() -> Self {
        Self {
            r: 0.0,
            delta_theta: 0.0,
            d: 1.0,
            big_d: 1.0,
            eta_expr: None,
            amp: 1.0,
            theta0: 0.0,
        }
    }
}

/// Validated barrier design together with its phase function.
#[derive(Debug, Clone)]
pub struct BarrierDesign {
    pub r_target: f64,
    pub sigma0: f64,
    pub delta_theta: f64,
    pub d: f64,
    pub big_d: f64,
    pub eta: Option<PhaseExpr>,
    pub amp: f64,
    /// Wrapped into [0, 2π).
    pub theta0: f64,
    sigma: PhaseExpr,
    phase: PhaseExpr,
}

pub const PRESETS: [&str; 3] = ["example1", "example2", "example3"];

impl BarrierDesign {
    /// Builds and validates a design on the default domain.
    pub fn new(spec: &DesignSpec) -> Result<Self, TunnelError> {
        let design = Self::build(spec)?;
        design.validate_on(DEFAULT_DOMAIN.0, DEFAULT_DOMAIN.1, VALIDATION_DX)?;
        Ok(design)
    }

    /// Builds the design without the domain scan.
    fn build(spec: &DesignSpec) -> Result<Self, TunnelError> {
        let r = spec.r;
        if !(0.0..1.0).contains(&r) {
            return Err(TunnelError::InvalidDesign(format!(
                "R must lie in [0, 1), got {r}"
            )));
        }
        for (name, v) in [("d", spec.d), ("D", spec.big_d), ("amp", spec.amp)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(TunnelError::InvalidDesign(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !spec.delta_theta.is_finite() || !spec.theta0.is_finite() {
            return Err(TunnelError::InvalidDesign(
                "phase parameters must be finite".into(),
            ));
        }
        let eta = match spec.eta_expr.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(text) => {
                let e = PhaseExpr::parse(text, "x")?;
                match e.root() {
                    Node::Const(c) if *c == 0.0 => None,
                    _ => Some(e),
                }
            }
        };
        let sigma0 = r.sqrt();
        let theta0 = spec.theta0.rem_euclid(TAU);
        let x = Node::var;

        let mut sigma: Option<Node> = (sigma0 != 0.0).then(|| {
            Node::constant(0.5 * sigma0)
                * (Node::constant(1.0) - (x() / Node::constant(spec.d)).tanh())
        });
        if let Some(e) = &eta {
            sigma = Some(match sigma {
                Some(s) => s + e.root().clone(),
                None => e.root().clone(),
            });
        }

        let mut body = x();
        if let Some(s) = &sigma {
            let g = (Node::constant(1.0) - s.clone()) / (Node::constant(1.0) + s.clone());
            let (sn, cs) = (x().sin(), x().cos());
            let num = (g.clone() - Node::constant(1.0)) * sn.clone() * cs.clone();
            let den = cs.clone() * cs + g * sn.clone() * sn;
            body = body + (num / den).atan();
        }
        if spec.delta_theta != 0.0 {
            body = body
                + Node::constant(0.5 * spec.delta_theta)
                    * (Node::constant(1.0) + (x() / Node::constant(spec.big_d)).tanh());
        }
        // θ₀ sits at the root so that derivatives do not depend on it.
        let phase = PhaseExpr::from_node(Node::constant(theta0) + body, "x");
        let sigma = PhaseExpr::from_node(sigma.unwrap_or(Node::constant(0.0)), "x");
        Ok(Self {
            r_target: r,
            sigma0,
            delta_theta: spec.delta_theta,
            d: spec.d,
            big_d: spec.big_d,
            eta,
            amp: spec.amp,
            theta0,
            sigma,
            phase,
        })
    }

    /// Checks |σ| < 1 and θ′ > 0 on a uniform scan of [x0, x1].
    pub fn validate_on(&self, x0: f64, x1: f64, dx: f64) -> Result<(), TunnelError> {
        let grid = Grid::new(x0, x1, dx)?;
        for x in grid.points() {
            let s = self.sigma.eval(x)?;
            if !(s.abs() < 1.0) {
                return Err(TunnelError::SigmaOutOfRange { x, sigma: s });
            }
            let j = self.phase.eval_jet(x)?;
            if !(j.v1 > 0.0) {
                return Err(TunnelError::MonotonicityViolated {
                    x,
                    theta_prime: j.v1,
                });
            }
        }
        Ok(())
    }

    pub fn preset(name: &str) -> Option<Self> {
        let spec = match name {
            "example1" => DesignSpec {
                r: 0.2,
                d: 2.0,
                ..Default::default()
            },
            "example2" => DesignSpec {
                delta_theta: -PI,
                big_d: 2.0,
                ..Default::default()
            },
            "example3" => DesignSpec {
                r: 0.05,
                delta_theta: -PI / 2.0,
                d: 1.25,
                big_d: 1.5,
                eta_expr: Some(
                    "0.1*exp(-(x+1)^2/(2*1.25^2)) - 0.15*exp(-(x-1)^2/(2*1.25^2))".into(),
                ),
                ..Default::default()
            },
            _ => return None,
        };
        Some(Self::new(&spec).expect("presets are valid"))
    }

    pub fn example1() -> Self {
        Self::preset("example1").expect("preset")
    }
    pub fn example2() -> Self {
        Self::preset("example2").expect("preset")
    }
    pub fn example3() -> Self {
        Self::preset("example3").expect("preset")
    }

    pub fn spec(&self) -> DesignSpec {
        DesignSpec {
            r: self.r_target,
            delta_theta: self.delta_theta,
            d: self.d,
            big_d: self.big_d,
            eta_expr: self.eta.as_ref().map(PhaseExpr::to_text),
            amp: self.amp,
            theta0: self.theta0,
        }
    }

    /// Same design with another phase constant.
    pub fn with_theta0(&self, theta0: f64) -> Self {
        let mut spec = self.spec();
        spec.theta0 = theta0;
        Self::build(&spec).expect("only θ₀ changed")
    }

    /// W = |A|²(1 − R), the conserved flux.
    pub fn flux(&self) -> f64 {
        self.amp * self.amp * (1.0 - self.r_target)
    }

    pub fn sigma_expr(&self) -> &PhaseExpr {
        &self.sigma
    }

    /// ū(x̄) = 1 − θ′² − ½{θ; x̄}.
    pub fn u_bar(&self, x: f64) -> Result<f64, TunnelError> {
        let p = polar_jets(self.phase.eval_jet(x)?, self.flux(), x)?;
        Ok(1.0 - p.omega_sq)
    }
}

/// σ(x̄) = σ₀(1 − tanh(x̄/d))/2 + η(x̄). NaN where η cannot be evaluated.
pub fn sigma_profile(design: &BarrierDesign, x: f64) -> f64 {
    design.sigma.eval(x).unwrap_or(f64::NAN)
}

/// The smooth, strictly increasing phase θ(x̄) of the design.
pub fn phase_function(design: &BarrierDesign) -> Result<PhaseExpr, TunnelError> {
    design.validate_on(DEFAULT_DOMAIN.0, DEFAULT_DOMAIN.1, VALIDATION_DX)?;
    Ok(design.phase.clone())
}

#[derive(Debug, Clone)]
pub struct TunnelSolution {
    pub design: BarrierDesign,
    pub grid: Vec<f64>,
    pub psi: Vec<Complex64>,
    pub dpsi: Vec<Complex64>,
    pub density: Vec<f64>,
    pub u_bar: Vec<f64>,
    pub theta: Vec<f64>,
    pub theta_prime: Vec<f64>,
    pub omega_bar_sq: Vec<f64>,
    /// max |ψ̄″ + (1 − ū)ψ̄| / max |(1 − ū)ψ̄| from the jets.
    pub tise_residual: f64,
}

pub fn default_grid() -> Grid {
    Grid::new(DEFAULT_DOMAIN.0, DEFAULT_DOMAIN.1, DEFAULT_DX).expect("default grid")
}

/// Samples ψ̄ = |A|·sqrt((1−R)/θ′)·e^{iθ} and ū on the grid.
pub fn synthesize(design: &BarrierDesign, grid: Grid) -> Result<TunnelSolution, TunnelError> {
    grid.validate()?;
    let n = grid.len();
    let flux = design.flux();
    let mut out = TunnelSolution {
        design: design.clone(),
        grid: Vec::with_capacity(n),
        psi: Vec::with_capacity(n),
        dpsi: Vec::with_capacity(n),
        density: Vec::with_capacity(n),
        u_bar: Vec::with_capacity(n),
        theta: Vec::with_capacity(n),
        theta_prime: Vec::with_capacity(n),
        omega_bar_sq: Vec::with_capacity(n),
        tise_residual: 0.0,
    };
    let mut res_max = 0.0_f64;
    let mut res_scale = 0.0_f64;
    for x in grid.points() {
        let p = polar_jets(design.phase.eval_jet(x)?, flux, x)?;
        out.grid.push(x);
        out.psi.push(Complex64::new(p.x.v0, p.y.v0));
        out.dpsi.push(Complex64::new(p.x.v1, p.y.v1));
        out.density.push(p.rho.v0 * p.rho.v0);
        out.u_bar.push(1.0 - p.omega_sq);
        out.theta.push(p.theta.v0);
        out.theta_prime.push(p.theta.v1);
        out.omega_bar_sq.push(p.omega_sq);
        let rr = (p.x.v2 + p.omega_sq * p.x.v0).hypot(p.y.v2 + p.omega_sq * p.y.v0);
        res_max = res_max.max(rr);
        res_scale = res_scale.max(p.omega_sq.abs() * p.rho.v0);
    }
    out.tise_residual = if res_scale > 0.0 {
        res_max / res_scale
    } else {
        res_max
    };
    Ok(out)
}

impl TunnelSolution {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// W = Re ψ̄·Im ψ̄′ − Re ψ̄′·Im ψ̄ at every sample.
    pub fn wronskian(&self) -> Vec<f64> {
        self.psi
            .iter()
            .zip(&self.dpsi)
            .map(|(p, d)| p.re * d.im - d.re * p.im)
            .collect()
    }

    /// max |density·θ′ − W| / W.
    pub fn flux_deviation(&self) -> f64 {
        let w = self.design.flux();
        self.density
            .iter()
            .zip(&self.theta_prime)
            .map(|(d, tp)| (d * tp - w).abs() / w)
            .fold(0.0, f64::max)
    }

    /// max |ū| over samples with |x̄| ≥ `edge`.
    pub fn edge_potential(&self, edge: f64) -> f64 {
        self.grid
            .iter()
            .zip(&self.u_bar)
            .filter(|(x, _)| x.abs() >= edge)
            .map(|(_, u)| u.abs())
            .fold(0.0, f64::max)
    }
}

/// Measures R and Δθ of the design's barrier with the integration oracle.
pub fn verify_design(
    design: &BarrierDesign,
    domain: Span,
    tol: Tolerance,
    opts: &ExtractOptions,
) -> Result<ScatteringReport, TunnelError> {
    let u = |x: f64| design.u_bar(x).unwrap_or(f64::NAN);
    Ok(extract_reflection_with(u, domain, tol, opts)?)
}

/// Two uncoupled oscillators x̄₁ = Re ψ̄, x̄₂ = Im ψ̄ driven by Ω̄² = 1 − ū,
/// with x̄ read as dimensionless time.
#[derive(Debug, Clone)]
pub struct ClassicalAnalog {
    pub scales: NondimScales,
    pub t_bar: Vec<f64>,
    /// Physical time t̄/ν.
    pub time: Vec<f64>,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub wronskian: Vec<f64>,
    pub omega_bar_sq: Vec<f64>,
    /// Times where Ω̄² changes sign.
    pub turning_points: Vec<f64>,
}

pub fn classical_analog(solution: &TunnelSolution, scales: NondimScales) -> ClassicalAnalog {
    let design = &solution.design;
    let omega_at = |x: f64| design.u_bar(x).map(|u| 1.0 - u);
    let mut turning_points = Vec::new();
    let w = &solution.omega_bar_sq;
    for i in 0..w.len() {
        if w[i] == 0.0 {
            turning_points.push(solution.grid[i]);
            continue;
        }
        if i + 1 < w.len() && w[i + 1] != 0.0 && (w[i] > 0.0) != (w[i + 1] > 0.0) {
            let (mut lo, mut hi) = (solution.grid[i], solution.grid[i + 1]);
            let lo_positive = w[i] > 0.0;
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                match omega_at(mid) {
                    Ok(v) if (v > 0.0) == lo_positive => lo = mid,
                    Ok(_) => hi = mid,
                    Err(_) => break,
                }
            }
            turning_points.push(0.5 * (lo + hi));
        }
    }
    ClassicalAnalog {
        scales,
        t_bar: solution.grid.clone(),
        time: solution
            .grid
            .iter()
            .map(|t| scales.to_physical_time(*t))
            .collect(),
        x1: solution.psi.iter().map(|p| p.re).collect(),
        x2: solution.psi.iter().map(|p| p.im).collect(),
        wronskian: solution.wronskian(),
        omega_bar_sq: w.clone(),
        turning_points,
    }
}

impl ClassicalAnalog {
    /// V = V₀·Ω̄²(t̄ᵢ)·X̄² at sample i.
    pub fn potential(&self, i: usize, x_bar: f64) -> f64 {
        self.scales.v0 * self.omega_bar_sq[i] * x_bar * x_bar
    }

    /// Potential samples on every time sample × the given positions.
    pub fn potential_grid(&self, x_bars: &[f64]) -> Vec<Vec<f64>> {
        (0..self.t_bar.len())
            .map(|i| x_bars.iter().map(|x| self.potential(i, *x)).collect())
            .collect()
    }
}
