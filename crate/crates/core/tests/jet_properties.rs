//! Jets against Cauchy-integral Taylor coefficients, and Schwarzian
//! characterization on fractional-linear maps.

use num_complex::Complex64;
use oscmap::jet_math::{parse, schwarzian, PhaseExpr};
use proptest::prelude::*;

mod common;

/// k-th derivative of an analytic f at x from N samples on a circle of
/// radius r: f⁽ᵏ⁾(x) = k!/(N·rᵏ)·Σ f(x + r·ωⱼ)·ωⱼ^(−k).
fn cauchy_derivatives(f: impl Fn(Complex64) -> Complex64, x: f64, r: f64) -> ([f64; 4], f64) {
    const N: usize = 64;
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    let mut fmax = 0.0_f64;
    for j in 0..N {
        let w = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / N as f64);
        let v = f(Complex64::new(x, 0.0) + w * r);
        fmax = fmax.max(v.norm());
        let mut wk = Complex64::new(1.0, 0.0);
        for a in acc.iter_mut() {
            *a += v / wk;
            wk *= w;
        }
    }
    let fact = [1.0, 1.0, 2.0, 6.0];
    let mut out = [0.0; 4];
    for k in 0..4 {
        out[k] = (acc[k] / N as f64).re * fact[k] / r.powi(k as i32);
    }
    (out, fmax)
}

fn check_against_cauchy(text: &str, f: impl Fn(Complex64) -> Complex64, x: f64) {
    let jet = parse(text, "t").unwrap().eval_jet(x).unwrap();
    let r = 0.1;
    let (d, fmax) = cauchy_derivatives(f, x, r);
    let got = [jet.v0, jet.v1, jet.v2, jet.v3];
    let fact = [1.0, 1.0, 2.0, 6.0];
    for k in 0..4 {
        // 1e-6 relative, with a floor at the oracle's own round-off level.
        let tol = 1e-6 * d[k].abs() + 1e-11 * fact[k] * fmax / r.powi(k as i32);
        assert!(
            (got[k] - d[k]).abs() <= tol,
            "{text} at {x}: order {k}: jet {} vs oracle {}",
            got[k],
            d[k]
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elementary_functions(x in -2.0f64..2.0, y in -1.2f64..1.2, z in 0.5f64..5.0) {
        check_against_cauchy("sin(t)", |c| c.sin(), x);
        check_against_cauchy("cos(t)", |c| c.cos(), x);
        check_against_cauchy("tan(t)", |c| c.tan(), y);
        check_against_cauchy("atan(t)", |c| c.atan(), x);
        check_against_cauchy("exp(t)", |c| c.exp(), x);
        check_against_cauchy("tanh(t)", |c| c.tanh(), x);
        check_against_cauchy("sqrt(t)", |c| c.sqrt(), z);
        check_against_cauchy("log(t)", |c| c.ln(), z);
        check_against_cauchy("t^2.5", |c| c.powf(2.5), z);
        check_against_cauchy("t^(-3)", |c| c.powi(-3), z);
        check_against_cauchy("t^t", |c| (c * c.ln()).exp(), z);
    }

    #[test]
    fn compositions(x in -1.5f64..1.5) {
        check_against_cauchy(
            "sin(exp(t)) * tanh(t) / (1 + t^2)",
            |c| c.exp().sin() * c.tanh() / (c * c + 1.0),
            x,
        );
        check_against_cauchy(
            "atan(2*sin(t)) - sqrt(2 + cos(3*t))",
            |c| (c.sin() * 2.0).atan() - (Complex64::new(2.0, 0.0) + (c * 3.0).cos()).sqrt(),
            x,
        );
    }

    #[test]
    fn schwarzian_vanishes_on_fractional_linear(
        a in -3.0f64..3.0, b in -3.0f64..3.0, c in -2.0f64..2.0, d in -3.0f64..3.0,
        t in -2.0f64..2.0,
    ) {
        prop_assume!((a * d - b * c).abs() > 0.1);
        prop_assume!((c * t + d).abs() > 0.2);
        let e = parse(&format!("({a:?}*t + ({b:?}))/(({c:?})*t + ({d:?}))"), "t").unwrap();
        prop_assert!(schwarzian(&e, t).unwrap().abs() < 1e-8);
    }

    #[test]
    fn schwarzian_invariant_under_post_composition(
        seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0, c in -1.0f64..1.0,
        shift in 0.5f64..3.0, t in -2.0f64..2.0,
    ) {
        let f_text = common::phases(seed, 1).remove(0);
        let f = PhaseExpr::parse(&f_text, "t").unwrap();
        let fv = f.eval(t).unwrap();
        // Keep c·f + d away from zero at the sample point.
        let d = -c * fv + shift;
        prop_assume!((a * d - b * c).abs() > 0.1);
        let g_text = format!("({a:?}*({f_text}) + ({b:?}))/(({c:?})*({f_text}) + ({d:?}))");
        let g = PhaseExpr::parse(&g_text, "t").unwrap();
        let (sf, sg) = (schwarzian(&f, t).unwrap(), schwarzian(&g, t).unwrap());
        prop_assert!((sf - sg).abs() <= 1e-8 * sf.abs().max(1.0), "{} vs {}", sf, sg);
    }
}

#[test]
fn reference_values() {
    let e = parse("atan(tanh(t))", "t").unwrap();
    let j = e.eval_jet(0.0).unwrap();
    assert_eq!(j.v0, 0.0);
    // central difference of the closed form, h = 1e-5
    let h: f64 = 1e-5;
    let fd = (h.tanh().atan() - (-h).tanh().atan()) / (2.0 * h);
    assert!((j.v1 - fd).abs() < 1e-9);
    assert!((j.v1 - 1.0).abs() < 1e-15);

    let j = parse("exp(t)", "t").unwrap().eval_jet(1.0).unwrap();
    for v in [j.v0, j.v1, j.v2, j.v3] {
        assert!((v - std::f64::consts::E).abs() < 1e-15);
    }
    assert!((schwarzian(&parse("tan(t)", "t").unwrap(), 0.3).unwrap() - 2.0).abs() < 1e-12);
    assert!((schwarzian(&parse("exp(t)", "t").unwrap(), 0.7).unwrap() + 0.5).abs() < 1e-14);
}
