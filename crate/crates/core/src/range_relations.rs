//! Ranges of energy, position and momentum of an oscillator whose phase is
//! kicked by a Gaussian pulse θ = θ₀ + ω₀t + a·exp(−t²/T²), and their
//! normalized products 2/L·ΔE·T and 2/L·ΔX·ΔP.

use std::f64::consts::{E, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Grid, GridError};
use crate::jet_math::{Node, PhaseExpr};
use crate::tdho_core::{generate_pair, GeneratedPair, TdhoError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RangeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("T = {t_cap} does not exceed T_min = {t_min}")]
    BelowMinimumTime { t_cap: f64, t_min: f64 },
    #[error("reference series have {found} samples, trajectory has {expected}")]
    GridMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Tdho(#[from] TdhoError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("cell (θ₀ #{theta0_index}, T #{t_index}): {source}")]
    Cell {
        theta0_index: usize,
        t_index: usize,
        source: Box<RangeError>,
    },
}

/// Smallest T keeping θ̇ > 0 for the Gaussian kick: (a/ω₀)·sqrt(2/e).
pub fn t_min(a: f64, omega0: f64) -> f64 {
    a / omega0 * (2.0 / E).sqrt()
}

/// Oscillator parameters shared by all cells of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub omega0: f64,
    pub a: f64,
    pub mass: f64,
    pub rho0: f64,
}

impl Default for OscillatorParams {
    /// M = 0.1 kg, ρ₀ = 0.01 m, ω₀ = 2π·5 rad/s, a = 1 rad.
    fn default() -> Self {
        Self {
            omega0: TAU * 5.0,
            a: 1.0,
            mass: 0.1,
            rho0: 0.01,
        }
    }
}

impl OscillatorParams {
    fn validate(&self) -> Result<(), RangeError> {
        for (name, v) in [
            ("omega0", self.omega0),
            ("mass", self.mass),
            ("rho0", self.rho0),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(RangeError::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(RangeError::InvalidParameter(format!(
                "a must be non-negative, got {}",
                self.a
            )));
        }
        Ok(())
    }

    pub fn t_min(&self) -> f64 {
        t_min(self.a, self.omega0)
    }

    /// L = M·ρ₀²·ω₀
    pub fn invariant(&self) -> f64 {
        self.mass * self.rho0 * self.rho0 * self.omega0
    }

    /// L̃ = ρ₀²·ω₀
    pub fn l_tilde(&self) -> f64 {
        self.rho0 * self.rho0 * self.omega0
    }

    /// Energy of the unperturbed motion, (M/2)·ρ₀²·ω₀².
    pub fn baseline_energy(&self) -> f64 {
        0.5 * self.mass * self.rho0 * self.rho0 * self.omega0 * self.omega0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub theta0: f64,
    pub omega0: f64,
    pub a: f64,
    pub t_cap: f64,
    pub mass: f64,
    pub rho0: f64,
}

impl PerturbationSpec {
    pub fn new(params: OscillatorParams, theta0: f64, t_cap: f64) -> Result<Self, RangeError> {
        params.validate()?;
        if !theta0.is_finite() {
            return Err(RangeError::InvalidParameter(format!("theta0 = {theta0}")));
        }
        let tm = params.t_min();
        if !(t_cap > tm && t_cap.is_finite()) {
            return Err(RangeError::BelowMinimumTime { t_cap, t_min: tm });
        }
        Ok(Self {
            theta0,
            omega0: params.omega0,
            a: params.a,
            t_cap,
            mass: params.mass,
            rho0: params.rho0,
        })
    }

    pub fn params(&self) -> OscillatorParams {
        OscillatorParams {
            omega0: self.omega0,
            a: self.a,
            mass: self.mass,
            rho0: self.rho0,
        }
    }

    /// θ₀ + ω₀t + a·exp(−(t/T)²)
    pub fn phase(&self) -> PhaseExpr {
        let t = Node::var;
        let mut root = Node::constant(self.theta0) + Node::constant(self.omega0) * t();
        if self.a != 0.0 {
            let arg = t() / Node::constant(self.t_cap);
            root = root + Node::constant(self.a) * (-(arg.pow(Node::constant(2.0)))).exp();
        }
        PhaseExpr::from_node(root, "t")
    }

    /// [−w·T, w·T] with step T/n.
    pub fn window(&self, half_width: f64, steps_per_t: usize) -> Result<Grid, RangeError> {
        if !(half_width > 0.0) || steps_per_t == 0 {
            return Err(RangeError::InvalidParameter(
                "window half-width and steps per T must be positive".into(),
            ));
        }
        let t = self.t_cap;
        Ok(Grid::new(
            -half_width * t,
            half_width * t,
            t / steps_per_t as f64,
        )?)
    }
}

/// Exact perturbed motion together with the unperturbed reference.
#[derive(Debug, Clone)]
pub struct PerturbedTrajectory {
    pub pair: GeneratedPair,
    pub x_ref: Vec<f64>,
    pub p_ref: Vec<f64>,
}

pub fn perturbed_trajectory(
    spec: &PerturbationSpec,
    grid: Grid,
) -> Result<PerturbedTrajectory, RangeError> {
    let params = spec.params();
    params.validate()?;
    trajectory_for_phase(&spec.phase(), spec.theta0, &params, grid)
}

/// Same as [`perturbed_trajectory`] for a caller-supplied perturbation p(t)
/// added to θ₀ + ω₀t. The amplitude `a` of `params` is ignored.
pub fn custom_trajectory(
    perturbation: &PhaseExpr,
    theta0: f64,
    params: &OscillatorParams,
    grid: Grid,
) -> Result<PerturbedTrajectory, RangeError> {
    params.validate()?;
    let root = Node::constant(theta0)
        + Node::constant(params.omega0) * Node::var()
        + perturbation.root().clone();
    trajectory_for_phase(
        &PhaseExpr::from_node(root, perturbation.variable()),
        theta0,
        params,
        grid,
    )
}

fn trajectory_for_phase(
    phase: &PhaseExpr,
    theta0: f64,
    params: &OscillatorParams,
    grid: Grid,
) -> Result<PerturbedTrajectory, RangeError> {
    let pair = generate_pair(phase, params.l_tilde(), params.mass, grid)?;
    let (w, r, m) = (params.omega0, params.rho0, params.mass);
    let (x_ref, p_ref) = pair
        .samples
        .iter()
        .map(|s| {
            let (sn, cs) = (theta0 + w * s.t).sin_cos();
            (r * cs, -m * r * w * sn)
        })
        .unzip();
    Ok(PerturbedTrajectory { pair, x_ref, p_ref })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ranges {
    pub delta_e_tk: f64,
    pub delta_x: f64,
    pub delta_p: f64,
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

/// Max − min of E_TK, x − x_ref and p − p_ref over the sampled window.
pub fn ranges(pair: &GeneratedPair, x_ref: &[f64], p_ref: &[f64]) -> Result<Ranges, RangeError> {
    for found in [x_ref.len(), p_ref.len()] {
        if found != pair.len() {
            return Err(RangeError::GridMismatch {
                expected: pair.len(),
                found,
            });
        }
    }
    let s = &pair.samples;
    Ok(Ranges {
        delta_e_tk: spread(s.iter().map(|s| s.e_tk)),
        delta_x: spread(s.iter().zip(x_ref).map(|(s, r)| s.x - r)),
        delta_p: spread(s.iter().zip(p_ref).map(|(s, r)| pair.mass * s.xdot - r)),
    })
}

impl PerturbedTrajectory {
    pub fn ranges(&self) -> Result<Ranges, RangeError> {
        ranges(&self.pair, &self.x_ref, &self.p_ref)
    }
}

/// θ₀ values k·step for k = 0, 1, … while k·step < 2π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theta0Grid {
    pub step: f64,
}

impl Default for Theta0Grid {
    fn default() -> Self {
        Self { step: TAU / 360.0 }
    }
}

impl Theta0Grid {
    pub fn from_degrees(step: f64) -> Self {
        Self {
            step: step.to_radians(),
        }
    }

    pub fn values(&self) -> Result<Vec<f64>, RangeError> {
        if !(self.step > 0.0 && self.step <= TAU) {
            return Err(RangeError::InvalidParameter(format!(
                "theta0 step must lie in (0, 2π], got {}",
                self.step
            )));
        }
        let n = (TAU / self.step - 1e-9).ceil() as usize;
        Ok((0..n).map(|k| k as f64 * self.step).collect())
    }
}

/// T values m·T_min for m = lo, lo + step, …, hi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub lo_mult: f64,
    pub hi_mult: f64,
    pub step_mult: f64,
}

impl Default for TGrid {
    fn default() -> Self {
        Self {
            lo_mult: 1.2,
            hi_mult: 4.0,
            step_mult: 0.1,
        }
    }
}

impl TGrid {
    pub fn multipliers(&self) -> Result<Vec<f64>, RangeError> {
        if !(self.lo_mult > 1.0) {
            return Err(RangeError::InvalidParameter(format!(
                "lowest T multiplier must exceed 1, got {}",
                self.lo_mult
            )));
        }
        if !(self.step_mult > 0.0 && self.hi_mult >= self.lo_mult && self.hi_mult.is_finite()) {
            return Err(RangeError::InvalidParameter(
                "T grid needs step > 0 and hi ≥ lo".into(),
            ));
        }
        let n = ((self.hi_mult - self.lo_mult) / self.step_mult + 1e-9).floor() as usize;
        Ok((0..=n)
            .map(|j| self.lo_mult + j as f64 * self.step_mult)
            .collect())
    }
}

/// Evaluation window in units of T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub half_width: f64,
    pub steps_per_t: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            half_width: 6.0,
            steps_per_t: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub theta0_index: usize,
    pub t_index: usize,
    pub theta0: f64,
    pub t_cap: f64,
    pub delta_e_tk: f64,
    pub delta_x: f64,
    pub delta_p: f64,
    /// 2/L·δE_TK·T
    pub norm_energy_product: f64,
    /// 2/L·δX·δP
    pub norm_xp_product: f64,
    /// max |Mρ²θ̇ − L| / L over the window.
    pub l_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TSummary {
    pub t_index: usize,
    pub t_cap: f64,
    pub t_mult: f64,
    pub delta_e_tk: f64,
    pub delta_x: f64,
    pub delta_p: f64,
    pub norm_energy_product: f64,
    pub norm_xp_product: f64,
    pub min_cell_energy_product: f64,
    pub min_cell_xp_product: f64,
}

impl TSummary {
    pub fn inequalities_hold(&self) -> bool {
        self.norm_energy_product >= 1.0 && self.norm_xp_product >= 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeExperimentResult {
    pub params: OscillatorParams,
    pub invariant: f64,
    pub t_min: f64,
    pub theta0_values: Vec<f64>,
    pub t_values: Vec<f64>,
    /// Row-major in (T index, θ₀ index).
    pub cells: Vec<CellResult>,
    pub summary: Vec<TSummary>,
}

impl RangeExperimentResult {
    pub fn cell(&self, theta0_index: usize, t_index: usize) -> &CellResult {
        &self.cells[t_index * self.theta0_values.len() + theta0_index]
    }

    pub fn all_inequalities_hold(&self) -> bool {
        self.summary.iter().all(TSummary::inequalities_hold)
    }

    pub fn max_l_drift(&self) -> f64 {
        self.cells.iter().map(|c| c.l_drift).fold(0.0, f64::max)
    }
}

/// Neumaier's compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

fn run_cell(
    params: &OscillatorParams,
    window: &WindowSpec,
    theta0: f64,
    t_cap: f64,
) -> Result<(Ranges, f64), RangeError> {
    let spec = PerturbationSpec::new(*params, theta0, t_cap)?;
    let grid = spec.window(window.half_width, window.steps_per_t)?;
    let traj = perturbed_trajectory(&spec, grid)?;
    let l = params.invariant();
    let l_drift = traj
        .pair
        .angular_momentum()
        .iter()
        .map(|v| (v - l).abs() / l)
        .fold(0.0, f64::max);
    Ok((traj.ranges()?, l_drift))
}

/// Runs every (θ₀, T) cell, in parallel on the current rayon pool, and
/// averages over θ₀ in index order.
pub fn run_experiment(
    params: OscillatorParams,
    theta0_grid: Theta0Grid,
    t_grid: TGrid,
    window: WindowSpec,
) -> Result<RangeExperimentResult, RangeError> {
    params.validate()?;
    let theta0_values = theta0_grid.values()?;
    let tm = params.t_min();
    let t_mults = t_grid.multipliers()?;
    let t_values: Vec<f64> = t_mults.iter().map(|m| m * tm).collect();
    let l = params.invariant();
    let n_theta = theta0_values.len();

    let cells: Vec<CellResult> = (0..t_values.len() * n_theta)
        .into_par_iter()
        .map(|k| {
            let (ti, pi) = (k / n_theta, k % n_theta);
            let (theta0, t_cap) = (theta0_values[pi], t_values[ti]);
            let (r, l_drift) =
                run_cell(&params, &window, theta0, t_cap).map_err(|e| RangeError::Cell {
                    theta0_index: pi,
                    t_index: ti,
                    source: Box::new(e),
                })?;
            Ok(CellResult {
                theta0_index: pi,
                t_index: ti,
                theta0,
                t_cap,
                delta_e_tk: r.delta_e_tk,
                delta_x: r.delta_x,
                delta_p: r.delta_p,
                norm_energy_product: 2.0 / l * r.delta_e_tk * t_cap,
                norm_xp_product: 2.0 / l * r.delta_x * r.delta_p,
                l_drift,
            })
        })
        .collect::<Result<_, RangeError>>()?;

    let summary = t_values
        .iter()
        .enumerate()
        .map(|(ti, &t_cap)| {
            let row = &cells[ti * n_theta..(ti + 1) * n_theta];
            let mean = |f: fn(&CellResult) -> f64| {
                let mut acc = CompensatedSum::default();
                row.iter().for_each(|c| acc.add(f(c)));
                acc.total() / n_theta as f64
            };
            let (de, dx, dp) = (
                mean(|c| c.delta_e_tk),
                mean(|c| c.delta_x),
                mean(|c| c.delta_p),
            );
            TSummary {
                t_index: ti,
                t_cap,
                t_mult: t_mults[ti],
                delta_e_tk: de,
                delta_x: dx,
                delta_p: dp,
                norm_energy_product: 2.0 / l * de * t_cap,
                norm_xp_product: 2.0 / l * dx * dp,
                min_cell_energy_product: row
                    .iter()
                    .map(|c| c.norm_energy_product)
                    .fold(f64::INFINITY, f64::min),
                min_cell_xp_product: row
                    .iter()
                    .map(|c| c.norm_xp_product)
                    .fold(f64::INFINITY, f64::min),
            }
        })
        .collect();

    Ok(RangeExperimentResult {
        params,
        invariant: l,
        t_min: tm,
        theta0_values,
        t_values,
        cells,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_min_values() {
        // high-precision value 0.027303472459440…; printed references truncate to 0.0273034
        assert!((t_min(1.0, TAU * 5.0) - 0.02730347245944087).abs() < 1e-16);
        assert!((t_min(1.0, TAU * 5.0) - 0.0273034).abs() < 1e-7);
        assert_eq!(t_min(0.0, 3.0), 0.0);
        assert_eq!(t_min(2.0, 7.0), 2.0 * t_min(1.0, 7.0));
    }

    #[test]
    fn reference_constants() {
        let p = OscillatorParams::default();
        assert!((p.l_tilde() - 3.14159e-3).abs() < 1e-8);
        assert!((p.invariant() - 3.141593e-4).abs() < 1e-10);
        assert!((p.baseline_energy() - 4.934802e-3).abs() < 1e-9);
    }

    #[test]
    fn spec_requires_t_above_minimum() {
        let p = OscillatorParams::default();
        assert!(matches!(
            PerturbationSpec::new(p, 0.0, p.t_min()),
            Err(RangeError::BelowMinimumTime { .. })
        ));
        assert!(PerturbationSpec::new(p, 0.0, 1.0001 * p.t_min()).is_ok());
        let free = OscillatorParams { a: 0.0, ..p };
        assert!(PerturbationSpec::new(free, 0.0, 1e-6).is_ok());
    }

    #[test]
    fn unperturbed_ranges_vanish() {
        let p = OscillatorParams {
            a: 0.0,
            ..Default::default()
        };
        let spec = PerturbationSpec::new(p, 0.7, 0.05).unwrap();
        let traj = perturbed_trajectory(&spec, spec.window(6.0, 200).unwrap()).unwrap();
        let r = traj.ranges().unwrap();
        assert!(r.delta_x < 1e-16 && r.delta_p < 1e-15);
        assert!(r.delta_e_tk < 1e-16);
    }

    #[test]
    fn grid_mismatch() {
        let spec = PerturbationSpec::new(OscillatorParams::default(), 0.0, 0.06).unwrap();
        let traj = perturbed_trajectory(&spec, spec.window(6.0, 50).unwrap()).unwrap();
        assert!(matches!(
            ranges(&traj.pair, &traj.x_ref[1..], &traj.p_ref),
            Err(RangeError::GridMismatch { .. })
        ));
    }

    #[test]
    fn grids() {
        assert_eq!(Theta0Grid::default().values().unwrap().len(), 360);
        assert_eq!(Theta0Grid::from_degrees(90.0).values().unwrap().len(), 4);
        let m = TGrid::default().multipliers().unwrap();
        assert_eq!(m.len(), 29);
        assert!((m[28] - 4.0).abs() < 1e-12);
        assert!(TGrid {
            lo_mult: 1.0,
            ..Default::default()
        }
        .multipliers()
        .is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        for v in [1.0, 1e100, 1.0, -1e100] {
            s.add(v);
        }
        assert_eq!(s.total(), 2.0);
    }

    #[test]
    fn single_cell_average_equals_cell() {
        let tg = TGrid {
            lo_mult: 2.0,
            hi_mult: 2.0,
            step_mult: 0.1,
        };
        let res = run_experiment(
            OscillatorParams::default(),
            Theta0Grid { step: TAU },
            tg,
            WindowSpec {
                half_width: 6.0,
                steps_per_t: 400,
            },
        )
        .unwrap();
        assert_eq!(res.cells.len(), 1);
        let (c, s) = (res.cells[0], res.summary[0]);
        assert_eq!(c.delta_e_tk, s.delta_e_tk);
        assert_eq!(c.delta_x, s.delta_x);
        assert_eq!(c.norm_xp_product, s.norm_xp_product);
    }

    #[test]
    fn custom_perturbation_matches_gaussian() {
        let p = OscillatorParams::default();
        let spec = PerturbationSpec::new(p, 0.3, 0.05).unwrap();
        let grid = spec.window(6.0, 100).unwrap();
        let a = perturbed_trajectory(&spec, grid).unwrap();
        let pert = PhaseExpr::parse("1*exp(-(t/0.05)^2)", "t").unwrap();
        let b = custom_trajectory(&pert, 0.3, &p, grid).unwrap();
        for (x, y) in a.pair.samples.iter().zip(&b.pair.samples) {
            assert!((x.x - y.x).abs() < 1e-15);
        }
    }
}
