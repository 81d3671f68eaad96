//! Shared generators for the integration suites.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bounded building blocks f with sup |f′| ≤ 1, as DSL text in `u`.
const SHAPES: [&str; 5] = ["sin(U)", "cos(U)", "atan(U)", "tanh(U)", "exp(-(U)^2)"];

/// θ(t) = θ₀ + ω·t + Σ aₖ·fₖ(bₖ·t + cₖ) with ω > 1.5·Σ|aₖbₖ|, which keeps
/// θ̇ ≥ ω/3 > 0 everywhere.
pub fn monotone_phase_text(rng: &mut impl Rng) -> String {
    let theta0: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let terms = rng.random_range(1..=3);
    let mut slope_budget = 0.0;
    let mut parts = Vec::new();
    for _ in 0..terms {
        let shape = SHAPES[rng.random_range(0..SHAPES.len())];
        let a: f64 = rng.random_range(-2.0..2.0);
        let b: f64 = rng.random_range(0.3..4.0);
        let c: f64 = rng.random_range(-1.0..1.0);
        slope_budget += (a * b).abs();
        let inner = format!("{b:?}*t + ({c:?})");
        parts.push(format!("({a:?})*{}", shape.replace('U', &inner)));
    }
    let omega = 1.5 * slope_budget + rng.random_range(0.5..5.0);
    format!("{theta0:?} + {omega:?}*t + {}", parts.join(" + "))
}

pub fn phases(seed: u64, count: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| monotone_phase_text(&mut rng)).collect()
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().map(f64::abs).fold(0.0, f64::max)
}
