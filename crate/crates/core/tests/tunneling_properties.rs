//! Barrier synthesis checked against the scattering oracle.

use std::f64::consts::{PI, TAU};

use oscmap::ode_oracle::{ExtractOptions, Span, Tolerance};
use oscmap::tdho_core::NondimScales;
use oscmap::tunneling::*;
use oscmap::Grid;
use proptest::prelude::*;

fn angle_gap(a: f64, b: f64) -> f64 {
    (a - b + PI).rem_euclid(TAU) - PI
}

/// Rejects designs whose σ leaves (−1, 1) or whose phase stops increasing.
fn valid(spec: &DesignSpec) -> Result<BarrierDesign, TestCaseError> {
    match BarrierDesign::new(spec) {
        Ok(d) => Ok(d),
        Err(TunnelError::SigmaOutOfRange { .. } | TunnelError::MonotonicityViolated { .. }) => {
            Err(TestCaseError::reject("design outside the valid region"))
        }
        Err(e) => panic!("{e}"),
    }
}

fn edge_decay(design: &BarrierDesign) -> f64 {
    let sol = synthesize(design, Grid::new(-20.0, 20.0, 1e-2).unwrap()).unwrap();
    sol.edge_potential(15.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_designs_round_trip(
        r in 0.0f64..0.5, dt in -PI..PI, d in 1.0f64..3.0, big_d in 1.0f64..3.0,
        c in -0.05f64..0.05, x0 in -2.0f64..2.0,
    ) {
        let spec = DesignSpec {
            r,
            delta_theta: dt,
            d,
            big_d,
            eta_expr: Some(format!("{c:?}*exp(-(x - ({x0:?}))^2/2)")),
            ..DesignSpec::default()
        };
        let design = valid(&spec)?;
        // Wide domain so the tanh tails of the widest designs are gone at the fit window.
        let rep = verify_design(&design, Span::new(-40.0, 40.0), Tolerance::default(), &ExtractOptions::default())
            .unwrap();
        prop_assert!((rep.r_extracted - r).abs() < 1e-3, "{spec:?}: R {}", rep.r_extracted);
        prop_assert!(angle_gap(rep.phase_shift_extracted, dt).abs() < 1e-2, "{spec:?}: Δθ {}", rep.phase_shift_extracted);
        prop_assert!(rep.wronskian_drift < 1e-8);
    }

    #[test]
    fn unit_width_barriers_decay(r in 0.0f64..0.5, dt in -PI..PI) {
        let spec = DesignSpec { r, delta_theta: dt, ..DesignSpec::default() };
        let design = valid(&spec)?;
        prop_assert!(edge_decay(&design) < 1e-6);
    }

    #[test]
    fn synthesized_solution_solves_schrodinger(r in 0.0f64..0.5, dt in -PI..PI, theta0 in 0.0f64..TAU) {
        let spec = DesignSpec { r, delta_theta: dt, theta0, ..DesignSpec::default() };
        let sol = synthesize(&valid(&spec)?, Grid::new(-10.0, 10.0, 1e-2).unwrap()).unwrap();
        prop_assert!(sol.tise_residual < 1e-10, "{}", sol.tise_residual);
        prop_assert!(sol.flux_deviation() < 1e-12);
    }
}

#[test]
fn presets_decay_at_edges() {
    assert!(edge_decay(&BarrierDesign::example1()) < 1e-6);
    assert!(edge_decay(&BarrierDesign::example3()) < 1e-6);
    // The wider phase step of the second preset leaves a slower e^(−2|x|/D) tail.
    assert!(edge_decay(&BarrierDesign::example2()) < 1e-5);
}

#[test]
fn potential_and_density_ignore_theta0() {
    let base = synthesize(&BarrierDesign::example1(), default_grid()).unwrap();
    for theta0 in [0.7, 2.0, 5.5] {
        let other = synthesize(
            &BarrierDesign::example1().with_theta0(theta0),
            default_grid(),
        )
        .unwrap();
        for i in 0..base.len() {
            assert!((base.u_bar[i] - other.u_bar[i]).abs() <= 1e-12);
            assert!((base.density[i] - other.density[i]).abs() <= 1e-12);
        }
        // The wavefunction itself rotates by the phase offset.
        let k = base.len() / 2;
        assert!(
            (other.psi[k] / base.psi[k] - num_complex::Complex64::from_polar(1.0, theta0)).norm()
                < 1e-12
        );
    }
}

#[test]
fn classical_analog_of_first_preset() {
    let sol = synthesize(
        &BarrierDesign::example1(),
        Grid::new(-10.0, 10.0, 1e-3).unwrap(),
    )
    .unwrap();
    let analog = classical_analog(&sol, NondimScales::unit());
    for w in &analog.wronskian {
        assert!((w - 0.8).abs() < 1e-12, "{w}");
    }
    for tp in &analog.turning_points {
        assert!((BarrierDesign::example1().u_bar(*tp).unwrap() - 1.0).abs() < 1e-9);
    }
    let sign_changes = sol
        .omega_bar_sq
        .windows(2)
        .filter(|p| (p[0] > 0.0) != (p[1] > 0.0))
        .count();
    assert_eq!(analog.turning_points.len(), sign_changes);
}
