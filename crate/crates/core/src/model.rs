//! The physical model: a rectangular barrier of height `v0` on `[a, b]`,
//! a particle of mass `mass`, and the constant `hbar`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct BarrierModel {
    a: f64,
    b: f64,
    v0: f64,
    hbar: f64,
    mass: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    a: f64,
    b: f64,
    v0: f64,
    #[serde(default = "default_hbar")]
    hbar: f64,
    #[serde(default = "default_mass")]
    mass: f64,
}

fn default_hbar() -> f64 {
    1.0
}

fn default_mass() -> f64 {
    0.5
}

impl TryFrom<RawModel> for BarrierModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        BarrierModel::with_units(raw.a, raw.b, raw.v0, raw.hbar, raw.mass)
    }
}

impl From<BarrierModel> for RawModel {
    fn from(m: BarrierModel) -> Self {
        RawModel {
            a: m.a,
            b: m.b,
            v0: m.v0,
            hbar: m.hbar,
            mass: m.mass,
        }
    }
}

impl Default for BarrierModel {
    /// `a = 0`, `b = 1`, `V0 = 2` in units `hbar = 1`, `m = 1/2`.
    fn default() -> Self {
        Self {
            a: 0.0,
            b: 1.0,
            v0: 2.0,
            hbar: 1.0,
            mass: 0.5,
        }
    }
}

impl BarrierModel {
    /// Barrier in the default units `hbar = 1`, `m = 1/2`, where `k = sqrt(E)`.
    pub fn new(a: f64, b: f64, v0: f64) -> Result<Self> {
        Self::with_units(a, b, v0, default_hbar(), default_mass())
    }

    pub fn with_units(a: f64, b: f64, v0: f64, hbar: f64, mass: f64) -> Result<Self> {
        let all_finite = [a, b, v0, hbar, mass].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(domain("barrier parameters must be finite"));
        }
        if a >= b {
            return Err(domain(format!("barrier edges must satisfy a < b (a = {a}, b = {b})")));
        }
        if v0 < 0.0 {
            return Err(domain(format!(
                "barrier height must be non-negative (V0 = {v0}); wells carry bound states"
            )));
        }
        if hbar <= 0.0 || mass <= 0.0 {
            return Err(domain("hbar and mass must be positive"));
        }
        Ok(Self { a, b, v0, hbar, mass })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Same geometry and units with a different barrier height.
    pub fn with_height(&self, v0: f64) -> Result<Self> {
        Self::with_units(self.a, self.b, v0, self.hbar, self.mass)
    }

    /// `V(x)`; the closed interval `[a, b]` carries `V0`.
    pub fn potential_at(&self, x: f64) -> f64 {
        if x < self.a || x > self.b {
            0.0
        } else {
            self.v0
        }
    }

    /// `hbar^2 / (2m)`, the kinetic prefactor of `H`.
    pub fn kinetic_scale(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }

    pub fn wave_number(&self, energy: f64) -> f64 {
        (energy / self.kinetic_scale()).sqrt()
    }

    pub fn energy_of(&self, k: f64) -> f64 {
        self.kinetic_scale() * k * k
    }

    /// `dE/dk = hbar^2 k / m`.
    pub fn energy_jacobian(&self, k: f64) -> f64 {
        2.0 * self.kinetic_scale() * k
    }

    /// Normalization `sqrt(m / (2 pi k hbar^2))` of the energy eigenfunctions.
    pub fn eigen_prefactor(&self, k: f64) -> f64 {
        (self.mass / (2.0 * PI * k * self.hbar * self.hbar)).sqrt()
    }

    pub fn wave_numbers(&self, energy: f64) -> Result<WaveNumbers> {
        if !(energy > 0.0) || !energy.is_finite() {
            return Err(domain(format!(
                "energy must lie in the open continuous spectrum (0, inf), got {energy}"
            )));
        }
        let k = self.wave_number(energy);
        let kappa_sq = (energy - self.v0) / self.kinetic_scale();
        let kappa = if kappa_sq >= 0.0 {
            Complex64::new(kappa_sq.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-kappa_sq).sqrt())
        };
        Ok(WaveNumbers { k, kappa, kappa_sq })
    }
}

/// Outer and inner wave numbers at one energy.
///
/// `kappa` is the principal square root of `2m(E - V0)/hbar^2`, so it is
/// real above the barrier and `i|kappa|` below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveNumbers {
    pub k: f64,
    pub kappa: Complex64,
    pub kappa_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observable {
    #[serde(rename = "Q")]
    Position,
    #[serde(rename = "P")]
    Momentum,
    #[serde(rename = "H")]
    Hamiltonian,
}

impl Observable {
    pub const ALL: [Observable; 3] = [Observable::Position, Observable::Momentum, Observable::Hamiltonian];

    pub fn symbol(&self) -> &'static str {
        match self {
            Observable::Position => "Q",
            Observable::Momentum => "P",
            Observable::Hamiltonian => "H",
        }
    }
}

/// Spectrum of an observable as a closed-open interval of the real line.
pub fn spectrum(observable: Observable) -> (f64, f64) {
    match observable {
        Observable::Position | Observable::Momentum => (f64::NEG_INFINITY, f64::INFINITY),
        Observable::Hamiltonian => (0.0, f64::INFINITY),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wave_numbers_spot_values() {
        let m = BarrierModel::new(0.0, 1.0, 2.0).unwrap();
        let w = m.wave_numbers(4.0).unwrap();
        assert_eq!(w.k, 2.0);
        assert!((w.kappa - Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-15);

        let w = m.wave_numbers(2.0).unwrap();
        assert_eq!(w.kappa, Complex64::new(0.0, 0.0));

        let w = m.wave_numbers(1.0).unwrap();
        assert_eq!(w.k, 1.0);
        assert_eq!(w.kappa, Complex64::new(0.0, 1.0));
    }

    #[test]
    fn non_positive_energy_rejected() {
        let m = BarrierModel::default();
        for e in [0.0, -1.0, f64::NAN] {
            assert!(matches!(m.wave_numbers(e), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn kappa_squares_back() {
        let m = BarrierModel::with_units(-0.3, 1.7, 3.5, 0.7, 1.9).unwrap();
        for &e in &[0.01, 0.5, 3.4999, 3.5001, 10.0, 1e3] {
            let w = m.wave_numbers(e).unwrap();
            let target = 2.0 * m.mass() * (e - m.v0()) / (m.hbar() * m.hbar());
            let sq = w.kappa * w.kappa;
            assert!((sq.re - target).abs() <= 1e-14 * target.abs().max(1e-300));
            assert!(sq.im.abs() <= 1e-14 * target.abs());
            assert!(w.kappa.im >= 0.0);
        }
    }

    #[test]
    fn k_strictly_increasing_and_free_limit() {
        let m = BarrierModel::new(0.0, 1.0, 0.0).unwrap();
        let mut prev = 0.0;
        for i in 1..200 {
            let e = 1e-3 * 1.07f64.powi(i);
            let w = m.wave_numbers(e).unwrap();
            assert!(w.k > prev);
            prev = w.k;
            assert!((w.kappa - Complex64::new(w.k, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn potential_profile() {
        let m = BarrierModel::new(0.0, 1.0, 2.0).unwrap();
        assert_eq!(m.potential_at(-5.0), 0.0);
        assert_eq!(m.potential_at(0.5), 2.0);
        assert_eq!(m.potential_at(1.0), 2.0);
        assert_eq!(m.potential_at(0.0), 2.0);
        assert_eq!(m.potential_at(1.0 + 1e-12), 0.0);
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(BarrierModel::new(1.0, 1.0, 2.0).is_err());
        assert!(BarrierModel::new(0.0, 1.0, -0.1).is_err());
        assert!(BarrierModel::with_units(0.0, 1.0, 1.0, 0.0, 1.0).is_err());
        assert!(BarrierModel::with_units(0.0, 1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn spectra() {
        assert_eq!(spectrum(Observable::Hamiltonian).0, 0.0);
        assert_eq!(spectrum(Observable::Position).0, f64::NEG_INFINITY);
    }
}
