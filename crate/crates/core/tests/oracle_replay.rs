//! Constructed solutions replayed through the adaptive integrator.

use oscmap::jet_math::PhaseExpr;
use oscmap::ode_oracle::{
    integrate_tdhoe, integrate_tdhoe_with, replay_pair, IntegratorOptions, Span, Tolerance,
};
use oscmap::range_relations::{OscillatorParams, PerturbationSpec};
use oscmap::tdho_core::{generate_pair, hermite_pair, GeneratedPair};
use oscmap::Grid;
use rayon::prelude::*;

mod common;

fn corpus() -> Vec<GeneratedPair> {
    let mut out: Vec<GeneratedPair> = common::phases(0x5eed, 20)
        .iter()
        .map(|text| {
            let phase = PhaseExpr::parse(text, "t").unwrap();
            generate_pair(&phase, 1.0, 1.0, Grid::new(-3.0, 3.0, 0.01).unwrap()).unwrap()
        })
        .collect();
    let p = OscillatorParams::default();
    for (theta0, mult) in [(0.0, 1.2), (1.0, 2.0), (4.0, 4.0)] {
        let spec = PerturbationSpec::new(p, theta0, mult * p.t_min()).unwrap();
        out.push(
            generate_pair(
                &spec.phase(),
                p.l_tilde(),
                p.mass,
                spec.window(6.0, 500).unwrap(),
            )
            .unwrap(),
        );
    }
    out
}

#[test]
fn corpus_replays_within_tolerance() {
    for pair in corpus() {
        let rep = replay_pair(&pair, Tolerance::default()).unwrap();
        assert!(
            rep.max_deviation < 1e-6,
            "{}: {rep:?}",
            pair.phase.to_text()
        );
        assert!(
            rep.wronskian_drift < 1e-8,
            "{}: {rep:?}",
            pair.phase.to_text()
        );
    }
}

#[test]
fn gaussian_kick_replay_scaled_by_amplitude() {
    let p = OscillatorParams::default();
    let spec = PerturbationSpec::new(p, 0.0, 2.0 * p.t_min()).unwrap();
    let pair = generate_pair(
        &spec.phase(),
        p.l_tilde(),
        p.mass,
        spec.window(6.0, 2000).unwrap(),
    )
    .unwrap();
    let rep = replay_pair(&pair, Tolerance::default()).unwrap();
    assert!(rep.max_abs_deviation < 1e-6 * p.rho0, "{rep:?}");
}

#[test]
fn hermite_ground_state_replay() {
    let h = hermite_pair(0).unwrap();
    let times = Grid::new(-6.0, 6.0, 0.01).unwrap().to_vec();
    let run = integrate_tdhoe(
        |t| h.omega_sq(t),
        h.solution(-6.0),
        h.derivative(-6.0),
        Span::new(-6.0, 6.0),
        Tolerance::new(1e-12, 1e-16),
        &times,
    )
    .unwrap();
    let err = common::max_abs(times.iter().zip(&run.y).map(|(t, y)| y.re - h.solution(*t)));
    assert!(err < 1e-6, "{err:e}");
}

#[test]
fn error_shrinks_with_tolerance() {
    // Linear chirp phase: the exact pair is known in closed form.
    let phase = PhaseExpr::parse("3*t + 0.2*t^2", "t").unwrap();
    let pair = generate_pair(&phase, 1.0, 1.0, Grid::new(0.0, 5.0, 0.05).unwrap()).unwrap();
    let errs: Vec<f64> = [1e-6, 1e-8, 1e-10]
        .iter()
        .map(|rel| {
            replay_pair(&pair, Tolerance::new(*rel, rel * 1e-2))
                .unwrap()
                .max_deviation
        })
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[2] < 1e-8, "{errs:?}");
}

#[test]
fn fixed_step_convergence_order() {
    let phase = PhaseExpr::parse("3*t + 0.2*t^2", "t").unwrap();
    let pair = generate_pair(&phase, 1.0, 1.0, Grid::new(0.0, 2.0, 0.5).unwrap()).unwrap();
    let times = pair.times();
    let first = pair.samples[0];
    let err = |h: f64| {
        let opts = IntegratorOptions {
            fixed_step: Some(h),
            ..IntegratorOptions::default()
        };
        let w = |t: f64| oscmap::tdho_core::omega_sq_from_phase(&pair.phase, t).unwrap();
        let run = integrate_tdhoe_with(w, first.x, first.xdot, Span::new(0.0, 2.0), opts, &times)
            .unwrap();
        common::max_abs(run.y.iter().zip(&pair.samples).map(|(y, s)| y.re - s.x))
    };
    let order = (err(0.02) / err(0.01)).log2();
    assert!(order > 4.5, "observed order {order}");
}

#[test]
fn replay_is_deterministic_across_threads() {
    let pairs = corpus();
    let serial: Vec<_> = pairs
        .iter()
        .map(|p| replay_pair(p, Tolerance::default()).unwrap())
        .collect();
    let parallel: Vec<_> = pairs
        .par_iter()
        .map(|p| replay_pair(p, Tolerance::default()).unwrap())
        .collect();
    assert_eq!(serial, parallel);
}
