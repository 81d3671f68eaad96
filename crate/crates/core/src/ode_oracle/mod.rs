//! Independent verification engine.
//!
//! Everything the constructive modules produce in closed form can be
//! replayed here by direct adaptive integration of y'' + Ω²(t)·y = 0. The
//! solution is always carried as a complex value, i.e. two real solutions
//! a quarter period apart, so the Wronskian Re y·Im y' − Re y'·Im y can be
//! tracked as a health check on every run.

mod dopri;
mod dwell;
mod replay;
mod scattering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dwell::{dwell_time_ratio, unwrapped_phase, DEFAULT_DWELL_WINDOW};
pub use replay::{replay_pair, ReplayReport, SampledCoefficient};
pub use scattering::{
    extract_reflection, extract_reflection_with, ExtractOptions, ScatteringReport,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("right-hand side is not finite at t = {t}")]
    NonFiniteRhs { t: f64 },
    #[error("step limit of {steps} exceeded at t = {t}")]
    StepLimitExceeded { t: f64, steps: usize },
    #[error("sample point {t} lies outside the integration span")]
    SampleOutOfSpan { t: f64 },
    #[error("invalid tolerance: rel = {rel:e}, abs = {abs:e} (both must be positive)")]
    InvalidTolerance { rel: f64, abs: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("asymptotic fit residual {residual:e} exceeds {limit:e}; the fit window is not free")]
    FitResidualTooLarge { residual: f64, limit: f64 },
    #[error("integration failed: {0}")]
    IntegrationFailed(Box<OracleError>),
    #[error("phase window starting at {theta} is not covered by the solution")]
    PhaseWindowNotFound { theta: f64 },
    #[error("solution phase is not increasing near t = {t}")]
    PhaseNotMonotone { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    fn validate(&self) -> Result<(), OracleError> {
        if self.rel > 0.0 && self.abs > 0.0 && self.rel.is_finite() && self.abs.is_finite() {
            Ok(())
        } else {
            Err(OracleError::InvalidTolerance {
                rel: self.rel,
                abs: self.abs,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub t0: f64,
    pub t1: f64,
}

impl Span {
    pub fn new(t0: f64, t1: f64) -> Self {
        Self { t0, t1 }
    }
}

/// Integrator settings beyond the error tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub tol: Tolerance,
    pub max_step: Option<f64>,
    /// Disables step-size control and uses this step throughout.
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self::from(Tolerance::default())
    }
}

impl From<Tolerance> for IntegratorOptions {
    fn from(tol: Tolerance) -> Self {
        Self {
            tol,
            max_step: None,
            fixed_step: None,
            max_steps: 20_000_000,
        }
    }
}

/// Samples of an integrated solution on a strictly increasing grid.
///
/// For complex runs `y` is the complex solution. For real runs the real
/// part is the requested solution and the imaginary part an independent
/// companion solution started a quarter period away, which is what the
/// Wronskian is tracked on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationResult {
    pub grid: Vec<f64>,
    pub y: Vec<Complex64>,
    pub ydot: Vec<Complex64>,
    /// Wronskian of the initial state.
    pub wronskian_initial: f64,
    /// max |W(t) − W(t₀)| / |W(t₀)| over samples and accepted steps.
    pub wronskian_drift: f64,
    pub steps_taken: usize,
    pub steps_rejected: usize,
}

impl IntegrationResult {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn real(&self) -> Vec<f64> {
        self.y.iter().map(|c| c.re).collect()
    }

    pub fn real_derivative(&self) -> Vec<f64> {
        self.ydot.iter().map(|c| c.re).collect()
    }

    /// W = Re y·Im y' − Re y'·Im y at every sample.
    pub fn wronskians(&self) -> Vec<f64> {
        self.y
            .iter()
            .zip(&self.ydot)
            .map(|(y, d)| wronskian(y.re, d.re, y.im, d.im))
            .collect()
    }
}

/// y1·y2' − y1'·y2
#[inline]
pub fn wronskian(y1: f64, y1dot: f64, y2: f64, y2dot: f64) -> f64 {
    y1 * y2dot - y1dot * y2
}

/// Integrates the real equation from (y0, ẏ0) at `span.t0`. Samples are
/// reported at `sample_at` (any order inside the span); when empty, the
/// accepted step points are reported instead.
pub fn integrate_tdhoe<F: Fn(f64) -> f64>(
    omega_sq: F,
    y0: f64,
    ydot0: f64,
    span: Span,
    tol: Tolerance,
    sample_at: &[f64],
) -> Result<IntegrationResult, OracleError> {
    integrate_tdhoe_with(omega_sq, y0, ydot0, span, tol.into(), sample_at)
}

pub fn integrate_tdhoe_with<F: Fn(f64) -> f64>(
    omega_sq: F,
    y0: f64,
    ydot0: f64,
    span: Span,
    opts: IntegratorOptions,
    sample_at: &[f64],
) -> Result<IntegrationResult, OracleError> {
    // Companion (z, ż) = (−ẏ0/s, s·y0): for a constant frequency s this is
    // the quadrature partner of y, and W = s·y0² + ẏ0²/s > 0.
    let w0 = omega_sq(span.t0);
    let s = if w0 > 0.0 && w0.is_finite() {
        w0.sqrt()
    } else {
        1.0
    };
    let psi0 = Complex64::new(y0, -ydot0 / s);
    let psidot0 = Complex64::new(ydot0, s * y0);
    integrate_complex_with(omega_sq, psi0, psidot0, span, opts, sample_at)
}

/// Integrates the complex equation ψ'' + Ω²ψ = 0 from (ψ0, ψ'0) at `span.t0`.
pub fn integrate_tdhoe_complex<F: Fn(f64) -> f64>(
    omega_sq: F,
    psi0: Complex64,
    psidot0: Complex64,
    span: Span,
    tol: Tolerance,
    sample_at: &[f64],
) -> Result<IntegrationResult, OracleError> {
    integrate_complex_with(omega_sq, psi0, psidot0, span, tol.into(), sample_at)
}

pub fn integrate_complex_with<F: Fn(f64) -> f64>(
    omega_sq: F,
    psi0: Complex64,
    psidot0: Complex64,
    span: Span,
    opts: IntegratorOptions,
    sample_at: &[f64],
) -> Result<IntegrationResult, OracleError> {
    opts.tol.validate()?;
    if !(span.t0.is_finite() && span.t1.is_finite()) {
        return Err(OracleError::InvalidInput(format!(
            "span must be finite, got [{}, {}]",
            span.t0, span.t1
        )));
    }
    if let Some(h) = opts.fixed_step {
        if !(h > 0.0) {
            return Err(OracleError::InvalidInput(format!(
                "fixed step must be positive, got {h}"
            )));
        }
    }
    let forward = span.t1 >= span.t0;
    let (lo, hi) = if forward {
        (span.t0, span.t1)
    } else {
        (span.t1, span.t0)
    };
    if let Some(&t) = sample_at.iter().find(|t| !(**t >= lo && **t <= hi)) {
        return Err(OracleError::SampleOutOfSpan { t });
    }
    // Order samples along the direction of integration, remembering where
    // each one goes in the increasing output.
    let mut order: Vec<f64> = sample_at.to_vec();
    order.sort_by(|a, b| a.total_cmp(b));
    order.dedup();
    if !forward {
        order.reverse();
    }

    let cfg = dopri::Config {
        rel: opts.tol.rel,
        abs: opts.tol.abs,
        max_step: opts.max_step.unwrap_or(f64::INFINITY),
        fixed_step: opts.fixed_step,
        max_steps: opts.max_steps,
    };
    let y0 = [psi0.re, psi0.im, psidot0.re, psidot0.im];
    let w_init = wronskian(y0[0], y0[2], y0[1], y0[3]);
    let w_scale = if w_init != 0.0 { w_init.abs() } else { 1.0 };
    let mut drift = 0.0_f64;
    let mut grid = Vec::with_capacity(order.len());
    let mut ys = Vec::with_capacity(order.len());
    let mut yds = Vec::with_capacity(order.len());
    let record_steps = order.is_empty();
    if record_steps {
        grid.push(span.t0);
        ys.push(psi0);
        yds.push(psidot0);
    }
    let stats = dopri::integrate(
        &omega_sq,
        span.t0,
        span.t1,
        y0,
        &order,
        &cfg,
        |idx, t, y| {
            drift = drift.max((wronskian(y[0], y[2], y[1], y[3]) - w_init).abs() / w_scale);
            if idx.is_some() || record_steps {
                grid.push(t);
                ys.push(Complex64::new(y[0], y[1]));
                yds.push(Complex64::new(y[2], y[3]));
            }
        },
    )?;
    if !forward {
        grid.reverse();
        ys.reverse();
        yds.reverse();
    }
    Ok(IntegrationResult {
        grid,
        y: ys,
        ydot: yds,
        wronskian_initial: w_init,
        wronskian_drift: drift,
        steps_taken: stats.steps_taken,
        steps_rejected: stats.steps_rejected,
    })
}

/// Solves the dimensionless stationary Schrödinger equation
/// ψ'' + (Ē − ū(x̄))ψ = 0 on the same integrator the oscillator uses.
pub fn solve_tise<U: Fn(f64) -> f64>(
    u_bar: U,
    e_bar: f64,
    psi0: Complex64,
    dpsi0: Complex64,
    span: Span,
    tol: Tolerance,
    sample_at: &[f64],
) -> Result<IntegrationResult, OracleError> {
    integrate_tdhoe_complex(|x| e_bar - u_bar(x), psi0, dpsi0, span, tol, sample_at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simple_harmonic_ten_periods() {
        let (w, rho0) = (2.0 * PI * 5.0, 0.01);
        let t1 = 10.0 * 2.0 * PI / w;
        let samples: Vec<f64> = (0..=2000).map(|i| t1 * i as f64 / 2000.0).collect();
        let r = integrate_tdhoe(
            |_| w * w,
            rho0,
            0.0,
            Span::new(0.0, t1),
            Tolerance::new(1e-10, 1e-14),
            &samples,
        )
        .unwrap();
        let err = r
            .grid
            .iter()
            .zip(&r.y)
            .map(|(t, y)| (y.re - rho0 * (w * t).cos()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8 * rho0, "max error {err:e}");
        // companion is the quadrature partner
        let err_im = r
            .grid
            .iter()
            .zip(&r.y)
            .map(|(t, y)| (y.im - rho0 * (w * t).sin()).abs())
            .fold(0.0, f64::max);
        assert!(err_im < 1e-8 * rho0);
        assert!(r.wronskian_drift < 1e-8);
    }

    #[test]
    fn backward_integration_returns_increasing_grid() {
        let samples = [0.0, 0.5, 1.0, 2.0];
        let r = integrate_tdhoe_complex(
            |_| 1.0,
            Complex64::new(2f64.cos(), 2f64.sin()),
            Complex64::new(-(2f64.sin()), 2f64.cos()),
            Span::new(2.0, 0.0),
            Tolerance::default(),
            &samples,
        )
        .unwrap();
        assert_eq!(r.grid, samples.to_vec());
        for (t, y) in r.grid.iter().zip(&r.y) {
            assert!((y - Complex64::new(t.cos(), t.sin())).norm() < 1e-9);
        }
    }

    #[test]
    fn step_points_when_no_samples() {
        let r = integrate_tdhoe(
            |_| 4.0,
            1.0,
            0.0,
            Span::new(0.0, 3.0),
            Tolerance::default(),
            &[],
        )
        .unwrap();
        assert!(r.grid.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*r.grid.last().unwrap(), 3.0);
        assert_eq!(r.grid.len(), r.steps_taken + 1);
    }

    #[test]
    fn error_paths() {
        let tol = Tolerance::default();
        assert!(matches!(
            integrate_tdhoe(
                |_| 1.0,
                1.0,
                0.0,
                Span::new(0.0, 1.0),
                Tolerance::new(0.0, 1e-9),
                &[]
            ),
            Err(OracleError::InvalidTolerance { .. })
        ));
        assert!(matches!(
            integrate_tdhoe(
                |t| if t > 0.5 { f64::NAN } else { 1.0 },
                1.0,
                0.0,
                Span::new(0.0, 1.0),
                tol,
                &[]
            ),
            Err(OracleError::NonFiniteRhs { .. })
        ));
        assert!(matches!(
            integrate_tdhoe(|_| 1.0, 1.0, 0.0, Span::new(0.0, 1.0), tol, &[1.5]),
            Err(OracleError::SampleOutOfSpan { .. })
        ));
        // A jump to an enormous frequency forces the step size to zero there.
        match integrate_tdhoe(
            |t| if t > 0.5 { 1e40 } else { 1.0 },
            1.0,
            0.0,
            Span::new(0.0, 2.0),
            tol,
            &[],
        ) {
            Err(OracleError::StepSizeUnderflow { t, .. }) => assert!((t - 0.5).abs() < 1e-6, "{t}"),
            r => panic!("{r:?}"),
        }
        let capped = IntegratorOptions {
            max_steps: 1000,
            ..Default::default()
        };
        assert!(matches!(
            integrate_tdhoe_with(
                |t| 1.0 / (1.0 - t).powi(4),
                1.0,
                0.0,
                Span::new(0.0, 2.0),
                capped,
                &[]
            ),
            Err(OracleError::StepLimitExceeded { .. })
        ));
    }

    #[test]
    fn fixed_step_order_is_at_least_four() {
        let run = |h: f64| {
            let r = integrate_tdhoe_with(
                |_| 1.0,
                1.0,
                0.0,
                Span::new(0.0, 10.0),
                IntegratorOptions {
                    fixed_step: Some(h),
                    ..Default::default()
                },
                &[10.0],
            )
            .unwrap();
            (r.y[0].re - 10f64.cos()).abs()
        };
        let (e1, e2) = (run(0.2), run(0.1));
        let order = (e1 / e2).log2();
        assert!(order >= 4.0, "observed order {order}");
    }

    #[test]
    fn wronskian_examples() {
        let t = 0.77_f64;
        assert!((wronskian(t.cos(), -t.sin(), t.sin(), t.cos()) - 1.0).abs() < 1e-15);
        let a = 3.0;
        let w = wronskian(0.3, 1.1, -0.4, 0.9);
        assert!((wronskian(a * 0.3, a * 1.1, a * -0.4, a * 0.9) - a * a * w).abs() < 1e-14);
    }

    #[test]
    fn dense_output_is_accurate_between_steps() {
        let samples: Vec<f64> = (0..=997).map(|i| i as f64 * 0.01003).collect();
        let r = integrate_tdhoe(
            |_| 1.0,
            1.0,
            0.0,
            Span::new(0.0, 10.0),
            Tolerance::new(1e-12, 1e-14),
            &samples,
        )
        .unwrap();
        let err = r
            .grid
            .iter()
            .zip(&r.y)
            .map(|(t, y)| (y.re - t.cos()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "dense output error {err:e}");
    }
}
