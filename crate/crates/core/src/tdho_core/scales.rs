//! Nondimensionalization shared by the Schrödinger and oscillator pictures.
//!
//! Quantum side: x₀ = ħ(2mU₀)^(−1/2), x̄ = x/x₀, Ē = E/U₀.
//! Classical side: ν = 2V₀/L, r₀ = (L/(Mν))^(1/2), t̄ = νt, X̄ = x/r₀.
//! With Ω̄²(t̄) = Ē − ū(t̄) both equations read y'' + (Ē − ū)·y = 0.

use serde::{Deserialize, Serialize};

use super::TdhoError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NondimScales {
    pub u0: f64,
    pub mass_q: f64,
    pub hbar: f64,
    pub x0: f64,
    pub v0: f64,
    pub l_action: f64,
    pub mass_c: f64,
    pub nu: f64,
    pub r0: f64,
}

impl NondimScales {
    pub fn new(
        u0: f64,
        mass_q: f64,
        hbar: f64,
        v0: f64,
        l_action: f64,
        mass_c: f64,
    ) -> Result<Self, TdhoError> {
        for (name, v) in [
            ("u0", u0),
            ("mass_q", mass_q),
            ("hbar", hbar),
            ("v0", v0),
            ("l_action", l_action),
            ("mass_c", mass_c),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(TdhoError::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        let x0 = hbar * (2.0 * mass_q * u0).powf(-0.5);
        let nu = 2.0 * v0 / l_action;
        let r0 = (l_action / (mass_c * nu)).sqrt();
        Ok(Self {
            u0,
            mass_q,
            hbar,
            x0,
            v0,
            l_action,
            mass_c,
            nu,
            r0,
        })
    }

    /// All scales equal to one: ħ = L = M = m = 1 with U₀ = 1/2 and V₀ = 1/2,
    /// so x₀ = r₀ = ν = 1 and the dimensionless and physical variables coincide.
    pub fn unit() -> Self {
        Self::new(0.5, 1.0, 1.0, 0.5, 1.0, 1.0).expect("unit scales are valid")
    }

    /// Characteristic angular frequency 2U₀/ħ of the quantum problem.
    pub fn omega_q(&self) -> f64 {
        2.0 * self.u0 / self.hbar
    }

    pub fn to_dimensionless_time(&self, t: f64) -> f64 {
        self.nu * t
    }
    pub fn to_physical_time(&self, t_bar: f64) -> f64 {
        t_bar / self.nu
    }
    pub fn to_dimensionless_position(&self, x: f64) -> f64 {
        x / self.r0
    }
    pub fn to_physical_position(&self, x_bar: f64) -> f64 {
        x_bar * self.r0
    }
    pub fn to_physical_omega_sq(&self, omega_bar_sq: f64) -> f64 {
        omega_bar_sq * self.nu * self.nu
    }
    pub fn to_dimensionless_coordinate(&self, x: f64) -> f64 {
        x / self.x0
    }
    pub fn to_physical_coordinate(&self, x_bar: f64) -> f64 {
        x_bar * self.x0
    }
    /// ψ̄ = x₀^(1/2)·ψ
    pub fn to_dimensionless_wavefunction(&self, psi: f64) -> f64 {
        self.x0.sqrt() * psi
    }
}

/// TISE potential ū and energy Ē viewed as a parametric oscillator with
/// Ω̄²(t̄) = Ē − ū(t̄).
#[derive(Clone)]
pub struct TiseMapping<F> {
    pub scales: NondimScales,
    pub u_bar: F,
    pub e_bar: f64,
}

pub fn map_tise_to_tdhoe<F: Fn(f64) -> f64>(
    scales: NondimScales,
    u_bar: F,
    e_bar: f64,
) -> TiseMapping<F> {
    TiseMapping {
        scales,
        u_bar,
        e_bar,
    }
}

impl<F: Fn(f64) -> f64> TiseMapping<F> {
    pub fn omega_bar_sq(&self, t_bar: f64) -> f64 {
        self.e_bar - (self.u_bar)(t_bar)
    }

    /// Time-dependent harmonic potential V = V₀·Ω̄²(t̄)·X̄².
    pub fn potential(&self, t_bar: f64, x_bar: f64) -> f64 {
        self.scales.v0 * self.omega_bar_sq(t_bar) * x_bar * x_bar
    }

    /// Instantaneous energy of the classical analog,
    /// E_TK = V₀·[Ẋ² + (Ē − ū)·X̄²].
    pub fn analog_energy(&self, t_bar: f64, x_bar: f64, x_bar_dot: f64) -> f64 {
        self.scales.v0 * (x_bar_dot * x_bar_dot + self.omega_bar_sq(t_bar) * x_bar * x_bar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_scales() {
        let s = NondimScales::new(2.0, 3.0, 0.5, 4.0, 0.25, 5.0).unwrap();
        assert_eq!(s.x0, 0.5 * (12.0f64).powf(-0.5));
        assert_eq!(s.nu, 32.0);
        assert_eq!(s.r0, (0.25f64 / (5.0 * 32.0)).sqrt());
        // x₀ = (ħ/(mω))^(1/2) with ω = 2U₀/ħ
        let alt = (s.hbar / (s.mass_q * s.omega_q())).sqrt();
        assert!((alt - s.x0).abs() < 1e-15);
        assert!(NondimScales::new(0.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn unit_scales() {
        let s = NondimScales::unit();
        assert_eq!((s.x0, s.nu, s.r0), (1.0, 1.0, 1.0));
    }

    #[test]
    fn free_particle_maps_to_constant_frequency() {
        let m = map_tise_to_tdhoe(NondimScales::unit(), |_| 0.0, 1.0);
        for t in [-5.0, 0.0, 3.0] {
            assert_eq!(m.omega_bar_sq(t), 1.0);
        }
    }

    #[test]
    fn harmonic_potential_maps_to_hermite_family() {
        for n in 0..4 {
            let e = 2.0 * n as f64 + 1.0;
            let m = map_tise_to_tdhoe(NondimScales::unit(), |t: f64| t * t, e);
            for t in [-2.0, 0.5, 1.5] {
                assert_eq!(m.omega_bar_sq(t), e - t * t);
            }
        }
    }

    #[test]
    fn analog_energy_formula() {
        let s = NondimScales::new(1.0, 1.0, 1.0, 2.0, 1.0, 1.0).unwrap();
        let m = map_tise_to_tdhoe(s, |_| 0.25, 1.0);
        assert_eq!(m.analog_energy(0.0, 2.0, 1.0), 2.0 * (1.0 + 0.75 * 4.0));
        assert_eq!(m.potential(0.0, 2.0), 2.0 * 0.75 * 4.0);
    }
}
