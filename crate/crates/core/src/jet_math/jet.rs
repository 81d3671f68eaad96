//! Third-order truncated Taylor jets.
//!
//! A [`Jet3`] carries a value together with its first three derivatives
//! with respect to a single evaluation variable. Arithmetic and the
//! elementary functions propagate the derivative stack with the Leibniz
//! rule and Faà di Bruno's formula truncated at order three, so every
//! derivative is exact up to round-off.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Value and first three derivatives of a scalar function at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet3 {
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

impl Jet3 {
    pub const fn new(v0: f64, v1: f64, v2: f64, v3: f64) -> Self {
        Self { v0, v1, v2, v3 }
    }

    /// A constant: all derivatives vanish.
    pub const fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0, 0.0)
    }

    /// The independent variable seeded at `t`.
    pub const fn variable(t: f64) -> Self {
        Self::new(t, 1.0, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.v0.is_finite() && self.v1.is_finite() && self.v2.is_finite() && self.v3.is_finite()
    }

    /// Jet of the first derivative. Only orders 0..=2 of the result are
    /// meaningful; the third slot is set to zero because the fourth
    /// derivative is not tracked.
    pub fn derivative(&self) -> Self {
        Self::new(self.v1, self.v2, self.v3, 0.0)
    }

    /// Compose an outer function with this jet, given the outer function's
    /// value and first three derivatives evaluated at `self.v0`.
    #[inline]
    pub fn compose(&self, f0: f64, f1: f64, f2: f64, f3: f64) -> Self {
        let g1 = self.v1;
        let g2 = self.v2;
        let g3 = self.v3;
        Self {
            v0: f0,
            v1: f1 * g1,
            v2: f2 * g1 * g1 + f1 * g2,
            v3: f3 * g1 * g1 * g1 + 3.0 * f2 * g1 * g2 + f1 * g3,
        }
    }

    pub fn recip(&self) -> Self {
        let r = 1.0 / self.v0;
        let r2 = r * r;
        self.compose(r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.v0.sin_cos();
        self.compose(s, c, -s, -c)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.v0.sin_cos();
        self.compose(c, -s, -c, s)
    }

    pub fn tan(&self) -> Self {
        let t = self.v0.tan();
        let sec2 = 1.0 + t * t;
        self.compose(t, sec2, 2.0 * t * sec2, sec2 * (2.0 + 6.0 * t * t))
    }

    pub fn atan(&self) -> Self {
        let x = self.v0;
        let q = 1.0 / (1.0 + x * x);
        self.compose(
            x.atan(),
            q,
            -2.0 * x * q * q,
            (6.0 * x * x - 2.0) * q * q * q,
        )
    }

    pub fn exp(&self) -> Self {
        let e = self.v0.exp();
        self.compose(e, e, e, e)
    }

    pub fn tanh(&self) -> Self {
        let t = self.v0.tanh();
        let s = 1.0 - t * t;
        self.compose(t, s, -2.0 * t * s, s * (6.0 * t * t - 2.0))
    }

    pub fn sqrt(&self) -> Self {
        let r = self.v0.sqrt();
        let ir = 1.0 / r;
        let ir3 = ir * ir * ir;
        self.compose(r, 0.5 * ir, -0.25 * ir3, 0.375 * ir3 * ir * ir)
    }

    pub fn ln(&self) -> Self {
        let x = self.v0;
        let r = 1.0 / x;
        self.compose(x.ln(), r, -r * r, 2.0 * r * r * r)
    }

    /// Real power with a positive base.
    pub fn powf(&self, p: f64) -> Self {
        let x = self.v0;
        let xp = x.powf(p);
        let r = 1.0 / x;
        self.compose(
            xp,
            p * xp * r,
            p * (p - 1.0) * xp * r * r,
            p * (p - 1.0) * (p - 2.0) * xp * r * r * r,
        )
    }

    /// Integer power by repeated squaring, so negative bases stay valid.
    pub fn powi(&self, n: i32) -> Self {
        let mut base = *self;
        let mut e = n.unsigned_abs();
        let mut acc = Jet3::constant(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    #[inline]
    fn add(self, o: Jet3) -> Jet3 {
        Jet3::new(
            self.v0 + o.v0,
            self.v1 + o.v1,
            self.v2 + o.v2,
            self.v3 + o.v3,
        )
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    #[inline]
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3::new(
            self.v0 - o.v0,
            self.v1 - o.v1,
            self.v2 - o.v2,
            self.v3 - o.v3,
        )
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    #[inline]
    fn mul(self, o: Jet3) -> Jet3 {
        Jet3 {
            v0: self.v0 * o.v0,
            v1: self.v1 * o.v0 + self.v0 * o.v1,
            v2: self.v2 * o.v0 + 2.0 * self.v1 * o.v1 + self.v0 * o.v2,
            v3: self.v3 * o.v0 + 3.0 * self.v2 * o.v1 + 3.0 * self.v1 * o.v2 + self.v0 * o.v3,
        }
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet3) -> Jet3 {
        self * o.recip()
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    #[inline]
    fn neg(self) -> Jet3 {
        Jet3::new(-self.v0, -self.v1, -self.v2, -self.v3)
    }
}

impl Add<f64> for Jet3 {
    type Output = Jet3;
    fn add(self, c: f64) -> Jet3 {
        Jet3 {
            v0: self.v0 + c,
            ..self
        }
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, c: f64) -> Jet3 {
        Jet3::new(self.v0 * c, self.v1 * c, self.v2 * c, self.v3 * c)
    }
}

/// Numbers an expression tree can be evaluated on.
///
/// Implemented by `f64` and [`Jet3`]; expression evaluation is written once
/// against this trait.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(c: f64) -> Self;
    /// The plain value, used for domain checks.
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn atan(self) -> Self;
    fn exp(self) -> Self;
    fn tanh(self) -> Self;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn powi(self, n: i32) -> Self;
}

impl Scalar for f64 {
    fn from_f64(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

impl Scalar for Jet3 {
    fn from_f64(c: f64) -> Self {
        Jet3::constant(c)
    }
    fn value(&self) -> f64 {
        self.v0
    }
    fn sin(self) -> Self {
        Jet3::sin(&self)
    }
    fn cos(self) -> Self {
        Jet3::cos(&self)
    }
    fn tan(self) -> Self {
        Jet3::tan(&self)
    }
    fn atan(self) -> Self {
        Jet3::atan(&self)
    }
    fn exp(self) -> Self {
        Jet3::exp(&self)
    }
    fn tanh(self) -> Self {
        Jet3::tanh(&self)
    }
    fn sqrt(self) -> Self {
        Jet3::sqrt(&self)
    }
    fn ln(self) -> Self {
        Jet3::ln(&self)
    }
    fn powf(self, p: f64) -> Self {
        Jet3::powf(&self, p)
    }
    fn powi(self, n: i32) -> Self {
        Jet3::powi(&self, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn lifting_rules() {
        assert_eq!(Jet3::constant(3.0), Jet3::new(3.0, 0.0, 0.0, 0.0));
        assert_eq!(Jet3::variable(2.5), Jet3::new(2.5, 1.0, 0.0, 0.0));
    }

    #[test]
    fn product_rule_matches_polynomial() {
        // t^2 * t = t^3 at t = 2: (8, 12, 12, 6)
        let t = Jet3::variable(2.0);
        let p = (t * t) * t;
        assert_eq!(p, Jet3::new(8.0, 12.0, 12.0, 6.0));
    }

    #[test]
    fn powi_handles_negative_base_and_exponent() {
        let t = Jet3::variable(-2.0);
        let p = t.powi(3);
        assert_eq!(p, Jet3::new(-8.0, 12.0, -12.0, 6.0));
        let q = t.powi(-1);
        // 1/t: -1/t^2, 2/t^3, -6/t^4
        assert!(close(q.v0, -0.5, 1e-15));
        assert!(close(q.v1, -0.25, 1e-15));
        assert!(close(q.v2, -0.25, 1e-15));
        assert!(close(q.v3, -0.375, 1e-15));
        assert_eq!(t.powi(0), Jet3::constant(1.0));
    }

    #[test]
    fn sine_maclaurin() {
        assert_eq!(Jet3::variable(0.0).sin(), Jet3::new(0.0, 1.0, 0.0, -1.0));
    }

    #[test]
    fn derivative_shifts_down() {
        let j = Jet3::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(j.derivative(), Jet3::new(2.0, 3.0, 4.0, 0.0));
    }
}
