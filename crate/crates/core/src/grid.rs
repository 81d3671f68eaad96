use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid grid: t0 = {t0}, t1 = {t1}, dt = {dt} (need finite t0 < t1 and dt > 0)")]
    Invalid { t0: f64, t1: f64, dt: f64 },
    #[error("grid with {0} points is too large")]
    TooLarge(usize),
}

/// Uniform sampling `t0, t0 + dt, ...` up to and including `t1` (within
/// round-off).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

const MAX_POINTS: usize = 200_000_000;

impl Grid {
    pub fn new(t0: f64, t1: f64, dt: f64) -> Result<Self, GridError> {
        let g = Self { t0, t1, dt };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let ok = self.t0.is_finite() && self.t1.is_finite() && self.dt.is_finite();
        if !ok || self.t1 <= self.t0 || self.dt <= 0.0 {
            return Err(GridError::Invalid {
                t0: self.t0,
                t1: self.t1,
                dt: self.dt,
            });
        }
        let n = self.len();
        if n > MAX_POINTS {
            return Err(GridError::TooLarge(n));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.t1 - self.t0) / self.dt + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.points().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_endpoints() {
        let g = Grid::new(-1.0, 1.0, 0.001).unwrap();
        assert_eq!(g.len(), 2001);
        assert!((g.point(2000) - 1.0).abs() < 1e-12);
        let g = Grid::new(0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.to_vec().len(), 4);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Grid::new(1.0, 1.0, 0.1).is_err());
        assert!(Grid::new(0.0, 1.0, 0.0).is_err());
        assert!(Grid::new(0.0, f64::NAN, 0.1).is_err());
        assert!(Grid::new(0.0, 1.0, 1e-12).is_err());
    }
}
