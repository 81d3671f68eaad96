//! Range experiment: window and resolution convergence, bounds and
//! reproducibility of the averaged products.

use oscmap::range_relations::*;
use proptest::prelude::*;

fn cell(theta0: f64, mult: f64, half_width: f64, steps_per_t: usize) -> Ranges {
    let p = OscillatorParams::default();
    let spec = PerturbationSpec::new(p, theta0, mult * p.t_min()).unwrap();
    perturbed_trajectory(&spec, spec.window(half_width, steps_per_t).unwrap())
        .unwrap()
        .ranges()
        .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn smoke() -> RangeExperimentResult {
    run_experiment(
        OscillatorParams::default(),
        Theta0Grid::from_degrees(90.0),
        TGrid::default(),
        WindowSpec {
            half_width: 6.0,
            steps_per_t: 1000,
        },
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn position_range_bounded_by_amplitudes(theta0 in 0.0f64..std::f64::consts::TAU, mult in 1.2f64..4.0) {
        let p = OscillatorParams::default();
        let spec = PerturbationSpec::new(p, theta0, mult * p.t_min()).unwrap();
        let traj = perturbed_trajectory(&spec, spec.window(6.0, 500).unwrap()).unwrap();
        let r = traj.ranges().unwrap();
        let rho_max = traj.pair.samples.iter().map(|s| s.rho).fold(0.0, f64::max);
        prop_assert!(r.delta_x <= 2.0 * (rho_max + p.rho0));
        let l = p.invariant();
        for v in traj.pair.angular_momentum() {
            prop_assert!((v - l).abs() < 1e-10 * l);
        }
    }
}

#[test]
fn window_width_has_converged() {
    for (theta0, mult) in [(0.0, 1.2), (2.5, 2.0), (5.0, 4.0)] {
        let (a, b) = (cell(theta0, mult, 6.0, 1000), cell(theta0, mult, 8.0, 1000));
        assert!(rel(a.delta_e_tk, b.delta_e_tk) < 1e-6);
        assert!(rel(a.delta_x, b.delta_x) < 1e-6);
        assert!(rel(a.delta_p, b.delta_p) < 1e-6);
    }
}

#[test]
fn sampling_has_converged() {
    let (a, b) = (cell(0.0, 1.2, 6.0, 4000), cell(0.0, 1.2, 6.0, 8000));
    assert!(rel(a.delta_e_tk, b.delta_e_tk) < 1e-4, "{a:?} {b:?}");
    assert!(rel(a.delta_x, b.delta_x) < 1e-4, "{a:?} {b:?}");
    assert!(rel(a.delta_p, b.delta_p) < 1e-4, "{a:?} {b:?}");
}

#[test]
fn averages_lie_between_cell_extremes() {
    let res = smoke();
    assert_eq!(res.theta0_values.len(), 4);
    assert_eq!(res.t_values.len(), 29);
    for s in &res.summary {
        let cells: Vec<&CellResult> = (0..4).map(|i| res.cell(i, s.t_index)).collect();
        let max_e = cells
            .iter()
            .map(|c| c.norm_energy_product)
            .fold(f64::MIN, f64::max);
        let max_xp = cells
            .iter()
            .map(|c| c.norm_xp_product)
            .fold(f64::MIN, f64::max);
        assert!(
            s.min_cell_energy_product <= s.norm_energy_product && s.norm_energy_product <= max_e
        );
        assert!(s.min_cell_xp_product <= s.norm_xp_product && s.norm_xp_product <= max_xp);
    }
    assert!(res.max_l_drift() < 1e-10);
}

#[test]
fn experiment_is_independent_of_thread_count() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(smoke)
    };
    assert_eq!(run(1), run(4));
}
