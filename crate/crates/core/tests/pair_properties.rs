//! Construction identities of generated pairs, Hermite validation family
//! and the Schrödinger/oscillator correspondence.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use oscmap::jet_math::PhaseExpr;
use oscmap::ode_oracle::{integrate_tdhoe_complex, solve_tise, Span, Tolerance};
use oscmap::range_relations::{OscillatorParams, PerturbationSpec};
use oscmap::tdho_core::*;
use oscmap::tunneling::BarrierDesign;
use oscmap::Grid;
use proptest::prelude::*;

mod common;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_pairs_satisfy_all_identities(seed in any::<u64>(), lt in 0.01f64..10.0, m in 0.01f64..10.0) {
        let text = common::phases(seed, 1).remove(0);
        let phase = PhaseExpr::parse(&text, "t").unwrap();
        let pair = generate_pair(&phase, lt, m, Grid::new(-3.0, 3.0, 0.01).unwrap()).unwrap();
        let rep = pair.check_invariants().unwrap();
        prop_assert!(rep.l_drift < 1e-10, "{text}: L drift {:e}", rep.l_drift);
        prop_assert!(rep.construction_residual < 1e-8, "{text}: {:e}", rep.construction_residual);
        prop_assert!(rep.tk_consistency < 1e-10, "{text}: {:e}", rep.tk_consistency);
        prop_assert!(rep.ermakov_pinney < 1e-8, "{text}: {:e}", rep.ermakov_pinney);
        prop_assert!(rep.wronskian_drift < 1e-10, "{text}: {:e}", rep.wronskian_drift);
        let l = m * lt;
        for v in pair.angular_momentum() {
            prop_assert!((v - l).abs() <= 1e-10 * l);
        }
    }

    #[test]
    fn phase_recovered_from_amplitude(seed in any::<u64>()) {
        let text = common::phases(seed, 1).remove(0);
        let phase = PhaseExpr::parse(&text, "t").unwrap();
        let pair = generate_pair(&phase, 1.0, 1.0, Grid::new(-2.0, 2.0, 1e-3).unwrap()).unwrap();
        let rho: Vec<f64> = pair.samples.iter().map(|s| s.rho).collect();
        let theta = phase_from_amplitude(&rho, 1e-3, 1.0, pair.samples[0].theta).unwrap();
        let err = common::max_abs(theta.iter().zip(&pair.samples).map(|(a, s)| a - s.theta));
        prop_assert!(err < 1e-7, "{text}: {err:e}");
    }

    #[test]
    fn radial_energy_lower_bound(rho in 0.01f64..10.0, w in 0.01f64..10.0, lt in 0.01f64..10.0, m in 0.1f64..5.0) {
        // AM–GM on the two ρ-dependent terms
        let e = radial_energy(rho, 0.0, w * w, lt, m);
        prop_assert!(e >= m * lt * w * (1.0 - 1e-12));
    }
}

#[test]
fn radial_energy_examples() {
    let (lt, w, m) = (3.0_f64, 2.0_f64, 0.5);
    let rho0 = (lt / w).sqrt();
    assert!((radial_energy(rho0, 0.0, w * w, lt, m) - m * lt * w).abs() < 1e-14);
    let big = 1e4;
    let e = radial_energy(big, 0.0, 0.0, lt, m);
    assert!((e - m * lt * lt / (2.0 * big * big)).abs() < 1e-25);
}

#[test]
fn unperturbed_reference_pair() {
    let p = OscillatorParams::default();
    let phase = PhaseExpr::parse("0.25 + 31.41592653589793*t", "t").unwrap();
    let pair = generate_pair(
        &phase,
        p.l_tilde(),
        p.mass,
        Grid::new(0.0, 0.5, 1e-4).unwrap(),
    )
    .unwrap();
    for s in &pair.samples {
        assert!((s.x - 0.01 * (0.25 + 10.0 * PI * s.t).cos()).abs() < 1e-15);
        assert!((s.e_tk - 4.934802e-3).abs() < 1e-9);
    }
}

#[test]
fn gaussian_kick_omega_sq_matches_finite_differences() {
    // Ω² at t = 0 for T = 4·T_min: jets vs a 7-point stencil on the closed form.
    let p = OscillatorParams::default();
    let t_cap = 4.0 * p.t_min();
    let spec = PerturbationSpec::new(p, 0.0, t_cap).unwrap();
    let w = omega_sq_from_phase(&spec.phase(), 0.0).unwrap();
    let theta = |t: f64| p.omega0 * t + (-(t / t_cap).powi(2)).exp();
    let h = 1e-3 * t_cap;
    let d1 = (-theta(-3.0 * h) + 9.0 * theta(-2.0 * h) - 45.0 * theta(-h) + 45.0 * theta(h)
        - 9.0 * theta(2.0 * h)
        + theta(3.0 * h))
        / (60.0 * h);
    let d2 = (2.0 * theta(-3.0 * h) - 27.0 * theta(-2.0 * h) + 270.0 * theta(-h)
        - 490.0 * theta(0.0)
        + 270.0 * theta(h)
        - 27.0 * theta(2.0 * h)
        + 2.0 * theta(3.0 * h))
        / (180.0 * h * h);
    let d3 = (theta(-3.0 * h) - 8.0 * theta(-2.0 * h) + 13.0 * theta(-h) - 13.0 * theta(h)
        + 8.0 * theta(2.0 * h)
        - theta(3.0 * h))
        / (8.0 * h * h * h);
    let fd = d1 * d1 + 0.5 * (d3 / d1 - 1.5 * (d2 / d1).powi(2));
    assert!((w - fd).abs() < 1e-5 * fd.abs(), "{w} vs {fd}");

    let res = ermakov_pinney_residual(&spec.phase(), p.l_tilde(), 0.0).unwrap();
    assert!(res.abs() < 1e-8 * p.omega0 * p.omega0 * p.rho0);
}

#[test]
fn phase_rate_with_atan_tanh() {
    let phase = PhaseExpr::parse("atan(tanh(t)) + 2*t", "t").unwrap();
    let w = omega_sq_from_phase(&phase, 0.0).unwrap();
    // θ̇(0) = 3, θ̈(0) = 0, θ⃛(0) = −2·2 = −4 (d³/dt³ atan(tanh t) at 0 is −4)
    assert!((w - (9.0 + 0.5 * (-4.0 / 3.0))).abs() < 1e-12, "{w}");
}

#[test]
fn gaussian_kick_phase_recovered_from_amplitude() {
    let p = OscillatorParams::default();
    let spec = PerturbationSpec::new(p, 0.4, 2.0 * p.t_min()).unwrap();
    let t = spec.t_cap;
    let pair = generate_pair(
        &spec.phase(),
        p.l_tilde(),
        p.mass,
        spec.window(6.0, 2000).unwrap(),
    )
    .unwrap();
    let rho: Vec<f64> = pair.samples.iter().map(|s| s.rho).collect();
    let theta = phase_from_amplitude(&rho, t / 2000.0, p.l_tilde(), pair.samples[0].theta).unwrap();
    let err = common::max_abs(
        theta
            .iter()
            .zip(&pair.samples)
            .map(|(v, s)| v - (0.4 + p.omega0 * s.t + (-(s.t / t).powi(2)).exp())),
    );
    assert!(err < 1e-7, "{err:e}");
}

#[test]
fn barrier_phase_ermakov_pinney() {
    let d = BarrierDesign::example3();
    let phase = oscmap::tunneling::phase_function(&d).unwrap();
    assert!(
        ermakov_pinney_residual(&phase, d.flux(), 1.0)
            .unwrap()
            .abs()
            < 1e-8
    );
}

#[test]
fn hermite_functions_residual_and_norm() {
    for n in 0..=5 {
        let h = hermite_pair(n).unwrap();
        let grid = Grid::new(-12.0, 12.0, 1e-3).unwrap();
        let vals: Vec<f64> = grid.points().map(|t| h.solution(t).powi(2)).collect();
        // composite Simpson
        let m = vals.len() - 1;
        let mut s = vals[0] + vals[m];
        for (i, v) in vals.iter().enumerate().take(m).skip(1) {
            s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        assert!((s * 1e-3 / 3.0 - 1.0).abs() < 1e-6, "n = {n}");

        let mut worst = 0.0_f64;
        let mut scale = 0.0_f64;
        for t in Grid::new(-6.0, 6.0, 1e-2).unwrap().points() {
            let j = h.solution_jet(t);
            worst = worst.max((j.v2 + h.omega_sq(t) * j.v0).abs());
            scale = scale.max((h.omega_sq(t) * j.v0).abs());
        }
        assert!(worst < 1e-8 * scale, "n = {n}: {worst:e}");
    }
}

#[test]
fn schrodinger_and_oscillator_share_arrays() {
    let u = |x: f64| x * x;
    let e = 5.0;
    let mapping = map_tise_to_tdhoe(NondimScales::unit(), u, e);
    let h = hermite_pair(2).unwrap();
    let samples: Vec<f64> = Grid::new(-4.0, 4.0, 0.01).unwrap().to_vec();
    let psi0 = Complex64::new(h.solution(-4.0), 0.0);
    let dpsi0 = Complex64::new(h.derivative(-4.0), 0.0);
    let tol = Tolerance::new(1e-10, 1e-14);
    let a = solve_tise(u, e, psi0, dpsi0, Span::new(-4.0, 4.0), tol, &samples).unwrap();
    let b = integrate_tdhoe_complex(
        |t| mapping.omega_bar_sq(t),
        psi0,
        dpsi0,
        Span::new(-4.0, 4.0),
        tol,
        &samples,
    )
    .unwrap();
    assert_eq!(a, b);
    let err = common::max_abs(a.grid.iter().zip(&a.y).map(|(t, y)| y.re - h.solution(*t)));
    assert!(err < 1e-7, "{err:e}");
}

#[test]
fn unperturbed_reference_is_periodic() {
    let phase = PhaseExpr::parse("1 + 3*t", "t").unwrap();
    let pair = generate_pair(
        &phase,
        2.0,
        1.0,
        Grid::new(0.0, TAU / 3.0, TAU / 300.0).unwrap(),
    )
    .unwrap();
    let (a, b) = (pair.samples[0], *pair.samples.last().unwrap());
    assert!((a.x - b.x).abs() < 1e-12 && (a.xdot - b.xdot).abs() < 1e-12);
}
