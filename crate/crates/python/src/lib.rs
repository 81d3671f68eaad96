//! Python bindings. Results come back as plain dicts and lists; columns are
//! lists of floats keyed by the CSV header names.

use oscmap::jet_math::PhaseExpr;
use oscmap::ode_oracle::{replay_pair, ExtractOptions, Span, Tolerance};
use oscmap::range_relations::{self, OscillatorParams, TGrid, Theta0Grid, WindowSpec};
use oscmap::tdho_core::{self, hermite_pair};
use oscmap::tunneling::{self, BarrierDesign, DesignSpec, PRESETS};
use oscmap::Grid;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(value).map_err(value_error)?)
}

fn phase(text: &str, variable: &str) -> PyResult<PhaseExpr> {
    PhaseExpr::parse(text, variable).map_err(value_error)
}

/// Schwarzian derivative of the phase at `t`.
#[pyfunction]
#[pyo3(signature = (phase_expr, t, variable = "t"))]
fn schwarzian(phase_expr: &str, t: f64, variable: &str) -> PyResult<f64> {
    phase(phase_expr, variable)?
        .schwarzian(t)
        .map_err(value_error)
}

/// Ω²(t) for which cos θ·sqrt(L̃/θ̇) solves ẍ + Ω²x = 0.
#[pyfunction]
#[pyo3(signature = (phase_expr, t, variable = "t"))]
fn omega_sq(phase_expr: &str, t: f64, variable: &str) -> PyResult<f64> {
    tdho_core::omega_sq_from_phase(&phase(phase_expr, variable)?, t).map_err(value_error)
}

/// Exact pair on the grid [t0, t1] with step dt. With `replay` the pair is
/// also integrated numerically and the deviation report attached.
#[pyfunction]
#[pyo3(signature = (phase_expr, t0, t1, dt, l_tilde = 1.0, mass = 1.0, variable = "t", replay = false))]
#[allow(clippy::too_many_arguments)]
fn generate_pair<'py>(
    py: Python<'py>,
    phase_expr: &str,
    t0: f64,
    t1: f64,
    dt: f64,
    l_tilde: f64,
    mass: f64,
    variable: &str,
    replay: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = Grid::new(t0, t1, dt).map_err(value_error)?;
    let p = phase(phase_expr, variable)?;
    let pair = py
        .detach(|| tdho_core::generate_pair(&p, l_tilde, mass, grid))
        .map_err(value_error)?;
    let out = PyDict::new(py);
    let s = &pair.samples;
    out.set_item("t", s.iter().map(|v| v.t).collect::<Vec<_>>())?;
    out.set_item("x", s.iter().map(|v| v.x).collect::<Vec<_>>())?;
    out.set_item("xdot", s.iter().map(|v| v.xdot).collect::<Vec<_>>())?;
    out.set_item("rho", s.iter().map(|v| v.rho).collect::<Vec<_>>())?;
    out.set_item("theta", s.iter().map(|v| v.theta).collect::<Vec<_>>())?;
    out.set_item(
        "omega_inst",
        s.iter().map(|v| v.omega_inst).collect::<Vec<_>>(),
    )?;
    out.set_item("omega_sq", s.iter().map(|v| v.omega_sq).collect::<Vec<_>>())?;
    out.set_item("e_tk", s.iter().map(|v| v.e_tk).collect::<Vec<_>>())?;
    let inv = pair.check_invariants().map_err(value_error)?;
    out.set_item("invariants", serialize(py, &inv)?)?;
    if replay {
        let report = py
            .detach(|| replay_pair(&pair, Tolerance::default()))
            .map_err(value_error)?;
        out.set_item("replay", serialize(py, &report)?)?;
    }
    Ok(out)
}

/// Normalized Hermite-function pair of order n sampled at `times`.
#[pyfunction]
fn hermite<'py>(py: Python<'py>, n: u32, times: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let h = hermite_pair(n).map_err(value_error)?;
    let out = PyDict::new(py);
    out.set_item(
        "x",
        times.iter().map(|&t| h.solution(t)).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "xdot",
        times.iter().map(|&t| h.derivative(t)).collect::<Vec<_>>(),
    )?;
    out.set_item(
        "omega_sq",
        times.iter().map(|&t| h.omega_sq(t)).collect::<Vec<_>>(),
    )?;
    out.set_item("t", times)?;
    out.set_item("normalization", h.normalization())?;
    Ok(out)
}

#[pyfunction]
fn t_min(a: f64, omega0: f64) -> f64 {
    range_relations::t_min(a, omega0)
}

/// Averaged range products over θ₀ for each T. Releases the GIL while the
/// grid runs.
#[pyfunction]
#[pyo3(signature = (
    theta0_step_deg = 1.0, t_lo_mult = 1.2, t_hi_mult = 4.0, t_step_mult = 0.1,
    half_width = 6.0, steps_per_t = 4000, omega0 = None, a = None, mass = None, rho0 = None,
))]
#[allow(clippy::too_many_arguments)]
fn range_experiment<'py>(
    py: Python<'py>,
    theta0_step_deg: f64,
    t_lo_mult: f64,
    t_hi_mult: f64,
    t_step_mult: f64,
    half_width: f64,
    steps_per_t: usize,
    omega0: Option<f64>,
    a: Option<f64>,
    mass: Option<f64>,
    rho0: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let d = OscillatorParams::default();
    let params = OscillatorParams {
        omega0: omega0.unwrap_or(d.omega0),
        a: a.unwrap_or(d.a),
        mass: mass.unwrap_or(d.mass),
        rho0: rho0.unwrap_or(d.rho0),
    };
    let t_grid = TGrid {
        lo_mult: t_lo_mult,
        hi_mult: t_hi_mult,
        step_mult: t_step_mult,
    };
    let window = WindowSpec {
        half_width,
        steps_per_t,
    };
    let res = py
        .detach(|| {
            range_relations::run_experiment(
                params,
                Theta0Grid::from_degrees(theta0_step_deg),
                t_grid,
                window,
            )
        })
        .map_err(value_error)?;
    serialize(py, &res)
}

/// Tunneling barrier with a prescribed reflection coefficient and
/// transmission phase shift.
#[pyclass(module = "oscmap", frozen)]
struct Barrier {
    design: BarrierDesign,
}

#[pymethods]
impl Barrier {
    #[new]
    #[pyo3(signature = (R = 0.0, delta_theta = 0.0, d = 1.0, D = 1.0, eta = None, amp = 1.0, theta0 = 0.0))]
    #[allow(non_snake_case)]
    fn new(
        R: f64,
        delta_theta: f64,
        d: f64,
        D: f64,
        eta: Option<String>,
        amp: f64,
        theta0: f64,
    ) -> PyResult<Self> {
        let spec = DesignSpec {
            r: R,
            delta_theta,
            d,
            big_d: D,
            eta_expr: eta,
            amp,
            theta0,
        };
        let design = BarrierDesign::new(&spec).map_err(value_error)?;
        Ok(Self { design })
    }

    /// One of `example1`, `example2`, `example3`.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        BarrierDesign::preset(name)
            .map(|design| Self { design })
            .ok_or_else(|| {
                value_error(format!(
                    "unknown preset '{name}', expected one of {}",
                    PRESETS.join(", ")
                ))
            })
    }

    /// Design from its JSON form `{R, delta_theta, d, D, eta_expr, amp, theta0}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec: DesignSpec = serde_json::from_str(text).map_err(value_error)?;
        let design = BarrierDesign::new(&spec).map_err(value_error)?;
        Ok(Self { design })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.design.spec()).map_err(value_error)
    }

    fn u_bar(&self, x: f64) -> PyResult<f64> {
        self.design.u_bar(x).map_err(value_error)
    }

    /// Samples ψ̄, ψ̄′, the density, the phase and the barrier on [x0, x1].
    #[pyo3(signature = (x0 = -20.0, x1 = 20.0, dx = 0.01))]
    fn synthesize<'py>(
        &self,
        py: Python<'py>,
        x0: f64,
        x1: f64,
        dx: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        self.design.validate_on(x0, x1, dx).map_err(value_error)?;
        let grid = Grid::new(x0, x1, dx).map_err(value_error)?;
        let sol = tunneling::synthesize(&self.design, grid).map_err(value_error)?;
        let out = PyDict::new(py);
        out.set_item("re_psi", sol.psi.iter().map(|p| p.re).collect::<Vec<_>>())?;
        out.set_item("im_psi", sol.psi.iter().map(|p| p.im).collect::<Vec<_>>())?;
        out.set_item("re_dpsi", sol.dpsi.iter().map(|p| p.re).collect::<Vec<_>>())?;
        out.set_item("im_dpsi", sol.dpsi.iter().map(|p| p.im).collect::<Vec<_>>())?;
        out.set_item("wronskian", sol.wronskian())?;
        out.set_item("tise_residual", sol.tise_residual)?;
        out.set_item("x", sol.grid)?;
        out.set_item("density", sol.density)?;
        out.set_item("theta", sol.theta)?;
        out.set_item("u_bar", sol.u_bar)?;
        out.set_item("omega_bar_sq", sol.omega_bar_sq)?;
        Ok(out)
    }

    /// Integrates the stationary equation through the barrier and fits the
    /// asymptotic waves to measure R and the phase shift.
    #[pyo3(signature = (x0 = -20.0, x1 = 20.0, tol = 1e-10))]
    fn verify<'py>(
        &self,
        py: Python<'py>,
        x0: f64,
        x1: f64,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let report = py
            .detach(|| {
                tunneling::verify_design(
                    &self.design,
                    Span::new(x0, x1),
                    Tolerance::new(tol, 1e-12),
                    &ExtractOptions::default(),
                )
            })
            .map_err(value_error)?;
        serialize(py, &report)
    }

    #[getter]
    fn r_target(&self) -> f64 {
        self.design.r_target
    }

    #[getter]
    fn delta_theta(&self) -> f64 {
        self.design.delta_theta
    }

    /// |A|²(1 − R), the conserved Wronskian.
    #[getter]
    fn flux(&self) -> f64 {
        self.design.flux()
    }

    fn __repr__(&self) -> String {
        format!(
            "Barrier(R={}, delta_theta={}, d={}, D={}, amp={}, theta0={})",
            self.design.r_target,
            self.design.delta_theta,
            self.design.d,
            self.design.big_d,
            self.design.amp,
            self.design.theta0
        )
    }
}

#[pymodule(name = "oscmap")]
fn oscmap_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(schwarzian, m)?)?;
    m.add_function(wrap_pyfunction!(omega_sq, m)?)?;
    m.add_function(wrap_pyfunction!(generate_pair, m)?)?;
    m.add_function(wrap_pyfunction!(hermite, m)?)?;
    m.add_function(wrap_pyfunction!(t_min, m)?)?;
    m.add_function(wrap_pyfunction!(range_experiment, m)?)?;
    m.add_class::<Barrier>()?;
    Ok(())
}
