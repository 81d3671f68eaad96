//! Exact oscillator solutions from phase functions.
//!
//! Given a phase θ(t) with θ̇ > 0, the equation ẍ + Ω²(t)·x = 0 with
//! Ω² = θ̇² + ½{θ; t} has the exact solution x = sqrt(L̃/θ̇)·cos θ, and
//! M·ρ²·θ̇ = M·L̃ is conserved along it.

mod hermite;
mod pair;
mod scales;

use thiserror::Error;

use crate::grid::GridError;
use crate::jet_math::EvalError;

pub use hermite::{hermite_pair, hermite_polynomial, HermitePair, MAX_HERMITE_ORDER};
pub(crate) use pair::polar_jets;
pub use pair::{
    ermakov_pinney_residual, generate_pair, omega_sq_from_phase, phase_from_amplitude,
    radial_energy, tk_energy, GeneratedPair, InvariantReport, OscillatorState,
};
pub use scales::{map_tise_to_tdhoe, NondimScales, TiseMapping};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TdhoError {
    #[error("phase is not increasing at t = {t}: dθ/dt = {theta_dot:e}")]
    PhaseNotMonotone { t: f64, theta_dot: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("amplitude sample {index} is not positive: {value}")]
    NonpositiveAmplitude { index: usize, value: f64 },
    #[error("Hermite order {n} exceeds the supported maximum {max}")]
    HermiteOrderTooLarge { n: u32, max: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
