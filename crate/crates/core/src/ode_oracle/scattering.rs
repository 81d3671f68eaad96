//! Reflection and transmission measured from a barrier profile.
//!
//! The equation ψ'' + (Ē − ū)ψ = 0 is integrated leftward from a pure
//! transmitted wave ψ = e^{ikx} (k = √Ē) at the right edge. On the left the
//! solution is fitted to a·e^{ikx} + b·e^{−ikx}, so that b/a is the reflected
//! amplitude and 1/a the transmitted one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{integrate_complex_with, IntegratorOptions, OracleError, Span, Tolerance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringReport {
    pub r_extracted: f64,
    pub sigma0_extracted: f64,
    pub phase_shift_extracted: f64,
    /// rms misfit of the asymptotic decomposition relative to rms |ψ|.
    pub fit_residual: f64,
    pub transmission: f64,
    /// Incident and reflected amplitudes for unit transmitted amplitude.
    pub incident: Complex64,
    pub reflected: Complex64,
    pub e_bar: f64,
    /// max |ū| at the two domain edges.
    pub edge_potential: f64,
    pub wronskian_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    pub e_bar: f64,
    /// Share of the domain, from the left edge, used for the fit.
    pub fit_fraction: f64,
    pub fit_points: usize,
    pub residual_limit: f64,
    /// Sample spacing used to follow the phase of ψ across the domain.
    pub phase_spacing: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            e_bar: 1.0,
            fit_fraction: 0.1,
            fit_points: 256,
            residual_limit: 1e-5,
            phase_spacing: 0.01,
        }
    }
}

pub fn extract_reflection<U: Fn(f64) -> f64>(
    u_bar: U,
    domain: Span,
    tol: Tolerance,
) -> Result<ScatteringReport, OracleError> {
    extract_reflection_with(u_bar, domain, tol, &ExtractOptions::default())
}

pub fn extract_reflection_with<U: Fn(f64) -> f64>(
    u_bar: U,
    domain: Span,
    tol: Tolerance,
    opts: &ExtractOptions,
) -> Result<ScatteringReport, OracleError> {
    let (xl, xr) = (domain.t0, domain.t1);
    if !(xl.is_finite() && xr.is_finite() && xl < xr) {
        return Err(OracleError::InvalidInput(format!(
            "domain must satisfy x_left < x_right, got [{xl}, {xr}]"
        )));
    }
    if !(opts.e_bar > 0.0 && opts.e_bar.is_finite()) {
        return Err(OracleError::InvalidInput(format!(
            "energy must be positive, got {}",
            opts.e_bar
        )));
    }
    if !(opts.fit_fraction > 0.0 && opts.fit_fraction <= 1.0) || opts.fit_points < 64 {
        return Err(OracleError::InvalidInput(
            "fit window needs a fraction in (0, 1] and at least 64 points".into(),
        ));
    }
    if !(opts.phase_spacing > 0.0) {
        return Err(OracleError::InvalidInput(
            "phase spacing must be positive".into(),
        ));
    }
    let k = opts.e_bar.sqrt();
    let fit_hi = xl + opts.fit_fraction * (xr - xl);
    let n_fit = opts.fit_points;
    let fit_x: Vec<f64> = (0..n_fit)
        .map(|i| xl + (fit_hi - xl) * i as f64 / (n_fit - 1) as f64)
        .collect();
    let n_track = ((xr - fit_hi) / opts.phase_spacing).ceil() as usize;
    let mut samples: Vec<f64> = (0..n_track)
        .map(|i| fit_hi + (xr - fit_hi) * (i + 1) as f64 / n_track as f64)
        .collect();
    samples.extend_from_slice(&fit_x);

    let psi_r = Complex64::from_polar(1.0, k * xr);
    let dpsi_r = Complex64::i() * k * psi_r;
    let res = integrate_complex_with(
        |x| opts.e_bar - u_bar(x),
        psi_r,
        dpsi_r,
        Span::new(xr, xl),
        IntegratorOptions::from(tol),
        &samples,
    )
    .map_err(|e| OracleError::IntegrationFailed(Box::new(e)))?;

    // Continuous phase of ψ, anchored at φ(x_right) = k·x_right.
    let n = res.len();
    let mut phase = vec![0.0; n];
    phase[n - 1] = k * xr;
    for i in (0..n - 1).rev() {
        let step = (res.y[i] * res.y[i + 1].conj()).arg();
        phase[i] = phase[i + 1] + step;
    }

    // Least squares over {e^{ikx}, e^{−ikx}}; the fit samples are the
    // leading n_fit entries of the increasing grid.
    let mut g12 = Complex64::new(0.0, 0.0);
    let mut rhs1 = Complex64::new(0.0, 0.0);
    let mut rhs2 = Complex64::new(0.0, 0.0);
    for i in 0..n_fit {
        let x = res.grid[i];
        let u1 = Complex64::from_polar(1.0, k * x);
        g12 += Complex64::from_polar(1.0, -2.0 * k * x);
        rhs1 += u1.conj() * res.y[i];
        rhs2 += u1 * res.y[i];
    }
    let nf = n_fit as f64;
    let g21 = g12.conj();
    let det = nf * nf - g12 * g21;
    let a = (rhs1 * nf - g12 * rhs2) / det;
    let b = (rhs2 * nf - g21 * rhs1) / det;

    let mut misfit = 0.0;
    let mut norm = 0.0;
    for i in 0..n_fit {
        let x = res.grid[i];
        let fit = a * Complex64::from_polar(1.0, k * x) + b * Complex64::from_polar(1.0, -k * x);
        misfit += (res.y[i] - fit).norm_sqr();
        norm += res.y[i].norm_sqr();
    }
    let fit_residual = (misfit / norm).sqrt();
    if !(fit_residual <= opts.residual_limit) {
        return Err(OracleError::FitResidualTooLarge {
            residual: fit_residual,
            limit: opts.residual_limit,
        });
    }

    let r = b / a;
    // φ = arg a + kx + Arg(1 + r·e^{−2ikx}) on the fit window, |r| < 1.
    let mut arg_a_unwrapped = 0.0;
    for (&x, &ph) in res.grid.iter().zip(&phase).take(n_fit) {
        let corr = (Complex64::new(1.0, 0.0) + r * Complex64::from_polar(1.0, -2.0 * k * x)).arg();
        arg_a_unwrapped += ph - k * x - corr;
    }
    arg_a_unwrapped /= nf;
    let principal = -a.arg();
    let target = -arg_a_unwrapped;
    let turns = ((target - principal) / std::f64::consts::TAU).round();
    let phase_shift = principal + turns * std::f64::consts::TAU;

    let edge_potential = u_bar(xl).abs().max(u_bar(xr).abs());
    Ok(ScatteringReport {
        r_extracted: r.norm_sqr(),
        sigma0_extracted: r.re,
        phase_shift_extracted: phase_shift,
        fit_residual,
        transmission: 1.0 / a.norm_sqr(),
        incident: a,
        reflected: b,
        e_bar: opts.e_bar,
        edge_potential,
        wronskian_drift: res.wronskian_drift,
    })
}
