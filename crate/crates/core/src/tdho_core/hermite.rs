//! Hermite functions as a validation family: H_n solves
//! ẍ + (2n + 1 − t²)·x = 0 and is normalized so that ∫ H_n² dt = 1.

use std::f64::consts::PI;

use crate::jet_math::{Jet3, Scalar};

use super::TdhoError;

pub const MAX_HERMITE_ORDER: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermitePair {
    pub n: u32,
}

pub fn hermite_pair(n: u32) -> Result<HermitePair, TdhoError> {
    if n > MAX_HERMITE_ORDER {
        return Err(TdhoError::HermiteOrderTooLarge {
            n,
            max: MAX_HERMITE_ORDER,
        });
    }
    Ok(HermitePair { n })
}

/// Physicists' Hermite polynomial h_n via h_{k+1} = 2t·h_k − 2k·h_{k−1}.
pub fn hermite_polynomial<T: Scalar>(n: u32, t: T) -> T {
    let mut prev = T::from_f64(1.0);
    if n == 0 {
        return prev;
    }
    let mut cur = t * T::from_f64(2.0);
    for k in 1..n {
        let next = T::from_f64(2.0) * t * cur - T::from_f64(2.0 * k as f64) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

impl HermitePair {
    /// π^(−1/4) / sqrt(2ⁿ n!)
    pub fn normalization(&self) -> f64 {
        let fact: f64 = (1..=self.n).map(f64::from).product();
        1.0 / (PI.powf(0.25) * (2f64.powi(self.n as i32) * fact).sqrt())
    }

    pub fn omega_sq(&self, t: f64) -> f64 {
        2.0 * self.n as f64 + 1.0 - t * t
    }

    pub fn solution_scalar<T: Scalar>(&self, t: T) -> T {
        let gauss = (-(t * t) * T::from_f64(0.5)).exp();
        gauss * hermite_polynomial(self.n, t) * T::from_f64(self.normalization())
    }

    pub fn solution(&self, t: f64) -> f64 {
        self.solution_scalar(t)
    }

    pub fn solution_jet(&self, t: f64) -> Jet3 {
        self.solution_scalar(Jet3::variable(t))
    }

    /// Ḣ_n = N·e^{−t²/2}·(2n·h_{n−1} − t·h_n).
    pub fn derivative(&self, t: f64) -> f64 {
        let n = self.n;
        let hn = hermite_polynomial(n, t);
        let dh = if n == 0 {
            0.0
        } else {
            2.0 * n as f64 * hermite_polynomial(n - 1, t)
        };
        self.normalization() * (-0.5 * t * t).exp() * (dh - t * hn)
    }
}
